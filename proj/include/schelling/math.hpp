// math.hpp
// Threshold constants, the "sufficiently less" relations, exact binomial
// tails and the limiting probability-ratio bases.
//
// Products of powers are evaluated in log space throughout.
#pragma once

#include <cstdint>
#include <stdexcept>

#include "schelling/event_kind.hpp"
#include "schelling/rational.hpp"

namespace schelling::math {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// g(x, k) = x^(kx) (1-x)^(k(1-x)) for x in (0,1).
double g(double x, double k);
double log_g(double x, double k);

struct ThresholdResult {
    double value = 0;
    double residual = 0;  // |log LHS - log RHS| at value
    double lo = 0;        // final bisection bracket
    double hi = 0;
    int iterations = 0;
};

// log LHS - log RHS of the defining equations; positive above the root.
double kappa_2d_equation(double kappa);
double kappa_3d_equation(double kappa);

// Unique root on (0, 0.5). Bisection from (0.01, 0.49) to width 1e-13 after a
// sign scan at step 1e-3 confirms a single crossing; throws otherwise.
ThresholdResult kappa_2d();
ThresholdResult kappa_3d();

// t0, t1 in (0, 0.5); throws DomainError otherwise.
bool suff_less_2d(double t0, double t1);  // g(t0,2) > 2 g(t1,3)
bool suff_less_3d(double t0, double t1);  // g(t0,8) > 2^19 g(t1,27)
// t0, t1 in (0.5, 1): 1-t0 sufficiently less than 1-t1.
bool suff_greater_2d(double t0, double t1);
bool suff_greater_3d(double t0, double t1);

enum class Relation { TwoD, ThreeD };

// Smallest d with suff_less(tau1 - d, tau1), accurate to well below 1e-7.
double min_gap(double tau1, Relation relation);

// X ~ Bin(N, 1/2). Thresholds are counts, compared exactly.
double binom_log_pmf(std::int64_t N, std::int64_t k);
double binom_at(std::int64_t N, std::int64_t k);
double binom_below(std::int64_t N, const Rational& threshold);     // P(X < threshold)
double binom_at_least(std::int64_t N, const Rational& threshold);  // P(X >= threshold)

// Exact probability of uh / ruh / ln / euh at a fixed node under the fair
// i.i.d. initial configuration. `dim` only affects uh.
double prob_event_exact(EventKind kind, int w, const Rational& tau, int dim = 2);

// Window sizes used by the events.
std::int64_t right_extended_size(int w);     // (2w+1)(3w+1)
std::int64_t lower_neighborhood_size(int w);  // 2w^2+2w+1
int extended_half_width_3d(int w);            // ceil(3w/2)

// Limiting bases of the ruh/ln and ruh/uh probability ratios (the 1/(2N)
// exponent terms dropped), and their finite-N forms.
double u4_base(double tau);
double u4_base_finite(double tau, double N);
double u5_base(double tau, double tau_beta);
double u5_base_finite(double tau, double tau_beta, double N);

// (tau_alpha + tau_prime) / (4 tau_prime); requires 0 < tau_prime < tau_alpha < 0.5.
double gamma_from(double tau_alpha, double tau_prime);

}  // namespace schelling::math
