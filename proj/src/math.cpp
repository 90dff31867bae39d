#include "schelling/math.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "schelling/lattice.hpp"

namespace schelling::math {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// x ln x with the 0 ln 0 = 0 convention.
double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

void require_open_half(double t, const char* name) {
    if (!(t > 0.0 && t < 0.5))
        throw DomainError(std::string(name) + " must lie in (0, 0.5), got " + std::to_string(t));
}

void require_upper_half(double t, const char* name) {
    if (!(t > 0.5 && t < 1.0))
        throw DomainError(std::string(name) + " must lie in (0.5, 1), got " + std::to_string(t));
}

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <class F>
ThresholdResult solve_unique_root(F f) {
    int sign_changes = 0;
    double prev = f(0.001);
    for (int i = 2; i <= 499; ++i) {
        const double cur = f(i * 1e-3);
        if ((prev < 0) != (cur < 0))
            ++sign_changes;
        prev = cur;
    }
    if (sign_changes != 1)
        throw DomainError("threshold equation does not have a unique root on (0, 0.5)");

    double lo = 0.01, hi = 0.49;
    double flo = f(lo);
    if ((flo < 0) == (f(hi) < 0))
        throw DomainError("threshold equation not bracketed by (0.01, 0.49)");
    int iterations = 0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        ++iterations;
    }
    ThresholdResult r;
    r.value = 0.5 * (lo + hi);
    r.residual = std::abs(f(r.value));
    r.lo = lo;
    r.hi = hi;
    r.iterations = iterations;
    return r;
}

}  // namespace

double log_g(double x, double k) {
    if (!(x > 0.0 && x < 1.0))
        throw DomainError("g(x, k) requires x in (0,1), got " + std::to_string(x));
    return k * x * std::log(x) + k * (1.0 - x) * std::log1p(-x);
}

double g(double x, double k) { return std::exp(log_g(x, k)); }

double kappa_2d_equation(double k) {
    // (1-2k)^(1-2k) = 2^(2(1-k)) k^k (1-k)^(3(1-k))
    return xlogx(1.0 - 2.0 * k) - (2.0 * (1.0 - k) * kLn2 + xlogx(k) + 3.0 * xlogx(1.0 - k));
}

double kappa_3d_equation(double k) {
    // (1-2k)^(4(1-2k)) = 2^(23-8k) k^(19k) (1-k)^(27(1-k))
    return 4.0 * xlogx(1.0 - 2.0 * k) - ((23.0 - 8.0 * k) * kLn2 + 19.0 * xlogx(k) + 27.0 * xlogx(1.0 - k));
}

ThresholdResult kappa_2d() { return solve_unique_root(kappa_2d_equation); }
ThresholdResult kappa_3d() { return solve_unique_root(kappa_3d_equation); }

bool suff_less_2d(double t0, double t1) {
    require_open_half(t0, "t0");
    require_open_half(t1, "t1");
    return log_g(t0, 2.0) > kLn2 + log_g(t1, 3.0);
}

bool suff_less_3d(double t0, double t1) {
    require_open_half(t0, "t0");
    require_open_half(t1, "t1");
    return log_g(t0, 8.0) > 19.0 * kLn2 + log_g(t1, 27.0);
}

bool suff_greater_2d(double t0, double t1) {
    require_upper_half(t0, "t0");
    require_upper_half(t1, "t1");
    return suff_less_2d(1.0 - t0, 1.0 - t1);
}

bool suff_greater_3d(double t0, double t1) {
    require_upper_half(t0, "t0");
    require_upper_half(t1, "t1");
    return suff_less_3d(1.0 - t0, 1.0 - t1);
}

double min_gap(double tau1, Relation relation) {
    require_open_half(tau1, "tau1");
    // margin(d) > 0 iff (tau1 - d) is sufficiently less than tau1; increasing in d.
    auto margin = [&](double d) {
        const double t0 = tau1 - d;
        if (relation == Relation::TwoD)
            return log_g(t0, 2.0) - (kLn2 + log_g(tau1, 3.0));
        return log_g(t0, 8.0) - (19.0 * kLn2 + log_g(tau1, 27.0));
    };
    double lo = 0.0;
    double hi = tau1 * (1.0 - 1e-12);
    if (margin(hi) <= 0.0)
        throw DomainError("no t0 in (0, tau1) is sufficiently less than tau1 = " + std::to_string(tau1));
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (margin(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double binom_log_pmf(std::int64_t N, std::int64_t k) {
    if (N < 0 || k < 0 || k > N)
        return -INFINITY;
    const double n = static_cast<double>(N);
    const double kk = static_cast<double>(k);
    return std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) - n * kLn2;
}

double binom_at(std::int64_t N, std::int64_t k) { return std::exp(binom_log_pmf(N, k)); }

namespace {

// Largest integer k with k < threshold.
std::int64_t largest_below(const Rational& threshold) {
    // floor((p - 1) / q) for positive q handles both exact and fractional thresholds.
    const std::int64_t p = threshold.num();
    const std::int64_t q = threshold.den();
    std::int64_t f = p / q;
    if (f * q > p)
        --f;  // floor for negatives
    return f * q == p ? f - 1 : f;
}

double sum_pmf(std::int64_t N, std::int64_t from, std::int64_t to) {
    if (from < 0)
        from = 0;
    if (to > N)
        to = N;
    CompensatedSum s;
    for (std::int64_t k = from; k <= to; ++k)
        s.add(binom_at(N, k));
    return s.value();
}

}  // namespace

double binom_below(std::int64_t N, const Rational& threshold) {
    if (N < 1)
        throw DomainError("binomial trials must be positive");
    const std::int64_t kmax = largest_below(threshold);
    // Sum the shorter side for accuracy.
    if (kmax < N / 2)
        return sum_pmf(N, 0, kmax);
    if (kmax >= N)
        return 1.0;
    return 1.0 - sum_pmf(N, kmax + 1, N);
}

double binom_at_least(std::int64_t N, const Rational& threshold) {
    if (N < 1)
        throw DomainError("binomial trials must be positive");
    const std::int64_t kmin = largest_below(threshold) + 1;
    if (kmin > N / 2)
        return sum_pmf(N, kmin, N);
    if (kmin <= 0)
        return 1.0;
    return 1.0 - sum_pmf(N, 0, kmin - 1);
}

std::int64_t right_extended_size(int w) { return static_cast<std::int64_t>(2 * w + 1) * (3 * w + 1); }
std::int64_t lower_neighborhood_size(int w) { return 2ll * w * w + 2ll * w + 1; }
int extended_half_width_3d(int w) { return (3 * w + 1) / 2; }

double prob_event_exact(EventKind kind, int w, const Rational& tau, int dim) {
    if (w < 1)
        throw DomainError("w must be positive");
    const std::int64_t side = 2 * w + 1;
    switch (kind) {
    case EventKind::uh: {
        const std::int64_t N = dim == 3 ? side * side * side : side * side;
        return binom_below(N, tau * Rational(N, 1));
    }
    case EventKind::ruh: {
        const std::int64_t M = right_extended_size(w);
        return binom_below(M, tau * Rational(M, 1));
    }
    case EventKind::ln:
        return binom_at_least(lower_neighborhood_size(w), tau * Rational(side * side, 1));
    case EventKind::euh: {
        const std::int64_t eside = 2 * extended_half_width_3d(w) + 1;
        const std::int64_t s = 3 * w + 1;
        return binom_below(eside * eside * eside, tau * Rational(s * s * s, 1));
    }
    default:
        throw DomainError("no closed form for event " + std::string(to_string(kind)));
    }
}

double u4_base(double tau) {
    require_open_half(tau, "tau");
    return std::exp(kappa_2d_equation(tau));
}

double u4_base_finite(double tau, double N) {
    require_open_half(tau, "tau");
    const double e = 1.0 / (2.0 * N);
    const double num = (1.0 - 2.0 * tau + e) * std::log1p(-2.0 * tau);
    const double den = (2.0 - 2.0 * tau - e) * kLn2 + xlogx(tau) + (3.0 * (1.0 - tau) + e) * std::log1p(-tau);
    return std::exp(num - den);
}

double u5_base(double tau, double tau_beta) {
    require_open_half(tau, "tau");
    require_open_half(tau_beta, "tau_beta");
    return std::exp(log_g(tau_beta, 2.0) - kLn2 - log_g(tau, 3.0));
}

double u5_base_finite(double tau, double tau_beta, double N) {
    require_open_half(tau, "tau");
    require_open_half(tau_beta, "tau_beta");
    const double e = 1.0 / (2.0 * N);
    const double num = (2.0 * tau_beta + e) * std::log(tau_beta) + (2.0 * (1.0 - tau_beta) + e) * std::log1p(-tau_beta);
    const double den = (1.0 - e) * kLn2 + (3.0 * tau + e) * std::log(tau) + (3.0 * (1.0 - tau) + e) * std::log1p(-tau);
    return std::exp(num - den);
}

double gamma_from(double tau_alpha, double tau_prime) {
    if (!(tau_prime > 0.0 && tau_prime < tau_alpha && tau_alpha < 0.5))
        throw DomainError("gamma_from requires 0 < tau_prime < tau_alpha < 0.5");
    const double gamma = (tau_alpha + tau_prime) / (4.0 * tau_prime);
    if (!(gamma > 0.5))
        throw DomainError("gamma_from produced gamma <= 1/2");
    return gamma;
}

}  // namespace schelling::math
