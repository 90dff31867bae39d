#include "doctest.h"

#include <cmath>

#include "schelling/math.hpp"

using namespace schelling;
using namespace schelling::math;

TEST_CASE("g at one half and its shape") {
    CHECK(g(0.5, 2) == doctest::Approx(0.25).epsilon(1e-15));
    for (double k : {1.0, 3.0, 8.0, 27.0})
        CHECK(g(0.5, k) == doctest::Approx(std::pow(2.0, -k)).epsilon(1e-14));
    for (double k : {2.0, 3.0}) {
        for (int i = 1; i < 499; ++i) {
            const double x = i * 1e-3;
            CHECK(g(x + 1e-3, k) < g(x, k));
            CHECK(g(1 - x - 1e-3, k) < g(1 - x, k));
        }
    }
    CHECK_THROWS_AS(g(0.0, 2), DomainError);
    CHECK_THROWS_AS(g(1.0, 2), DomainError);
    CHECK_THROWS_AS(log_g(-0.2, 2), DomainError);
}

TEST_CASE("kappa in two dimensions") {
    const auto k = kappa_2d();
    CHECK(std::abs(k.value - 0.365227) < 1e-5);
    CHECK(k.residual <= 1e-12);
    CHECK(k.lo < k.value);
    CHECK(k.value < k.hi);
    CHECK(k.hi - k.lo <= 1e-13);
    CHECK(k.iterations > 0);
    int changes = 0;
    for (int i = 1; i < 499; ++i)
        changes += (kappa_2d_equation(i * 1e-3) < 0) != (kappa_2d_equation((i + 1) * 1e-3) < 0);
    CHECK(changes == 1);
}

TEST_CASE("kappa in three dimensions") {
    const auto k = kappa_3d();
    CHECK(std::abs(k.value - 0.3897216) < 1e-6);
    CHECK(k.residual <= 1e-12);
    CHECK(k.value > 0.25);
    CHECK(k.value < 0.5);
    int changes = 0;
    for (int i = 1; i < 499; ++i)
        changes += (kappa_3d_equation(i * 1e-3) < 0) != (kappa_3d_equation((i + 1) * 1e-3) < 0);
    CHECK(changes == 1);
}

TEST_CASE("sufficiently-less relations near the tabulated gaps") {
    CHECK(suff_less_2d(0.45 - 0.0115, 0.45));
    CHECK_FALSE(suff_less_2d(0.45 - 0.0110, 0.45));
    CHECK(suff_less_3d(0.45 - 0.0420, 0.45));
    CHECK_FALSE(suff_less_3d(0.45 - 0.0415, 0.45));
    CHECK_THROWS_AS(suff_less_2d(0.5, 0.4), DomainError);
    CHECK_THROWS_AS(suff_less_3d(0.2, 0.0), DomainError);
    CHECK_THROWS_AS(suff_greater_2d(0.4, 0.6), DomainError);
}

TEST_CASE("relation properties over a grid") {
    for (int i = 1; i < 100; ++i)
        for (int j = 1; j < 100; ++j) {
            const double a = i * 0.005, b = j * 0.005;
            const bool two = suff_less_2d(a, b);
            const bool three = suff_less_3d(a, b);
            if (two)
                CHECK(a < b);
            if (three)
                CHECK(two);
            if (two && i > 1)
                CHECK(suff_less_2d(a - 0.005, b));
            CHECK(suff_greater_2d(1 - a, 1 - b) == two);
            CHECK(suff_greater_3d(1 - a, 1 - b) == three);
        }
}

TEST_CASE("minimal gaps") {
    struct Row {
        double tau, two, three;
    };
    const Row rows[] = {
        {0.39, 0.0244432, 0.0900756}, {0.40, 0.022266, 0.0822134},  {0.41, 0.0200757, 0.0742546},
        {0.42, 0.0178737, 0.0662106}, {0.43, 0.0156614, 0.0580921}, {0.45, 0.0112116, 0.0416727},
        {0.47, 0.0067368, 0.0250741}, {0.49, 0.0022472, 0.0083697},
    };
    double prev2 = 1, prev3 = 1;
    for (const auto& r : rows) {
        const double d2 = min_gap(r.tau, Relation::TwoD);
        const double d3 = min_gap(r.tau, Relation::ThreeD);
        CHECK(std::abs(d2 - r.two) < 1e-5);
        CHECK(std::abs(d3 - r.three) < 1e-5);
        CHECK(d2 < prev2);
        CHECK(d3 < prev3);
        prev2 = d2;
        prev3 = d3;
        CHECK(suff_less_2d(r.tau - d2 - 1e-9, r.tau));
        CHECK_FALSE(suff_less_2d(r.tau - d2 + 1e-9, r.tau));
    }
    // Far from one half even the full interval is not enough in 3D.
    CHECK_THROWS_AS(min_gap(0.1, Relation::ThreeD), DomainError);
    CHECK_THROWS_AS(min_gap(0.6, Relation::TwoD), DomainError);
}

TEST_CASE("binomial tails") {
    CHECK(binom_below(9, Rational(9, 4)) == doctest::Approx(46.0 / 512.0).epsilon(1e-14));
    CHECK(binom_below(9, Rational(3, 1)) == doctest::Approx(46.0 / 512.0).epsilon(1e-14));
    CHECK(binom_below(9, Rational(0, 1)) == 0.0);
    CHECK(binom_below(9, Rational(10, 1)) == 1.0);
    for (std::int64_t N : {1, 9, 25, 121, 1000}) {
        CHECK(binom_at_least(N, Rational(N, 1)) == doctest::Approx(std::ldexp(1.0, -static_cast<int>(N))).epsilon(1e-12));
        double total = 0;
        for (std::int64_t k = 0; k <= N; ++k) {
            total += binom_at(N, k);
            CHECK(binom_at(N, k) == doctest::Approx(binom_at(N, N - k)).epsilon(1e-12));
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
        for (std::int64_t k = 0; k <= N; k += std::max<std::int64_t>(1, N / 7)) {
            const Rational t(k, 1);
            CHECK(std::abs(binom_below(N, t) + binom_at_least(N, t) - 1.0) < 1e-12);
        }
    }
    CHECK_THROWS_AS(binom_below(0, Rational(1, 2)), DomainError);
}

TEST_CASE("exact event probabilities") {
    CHECK(prob_event_exact(EventKind::uh, 1, Rational(1, 4)) == doctest::Approx(46.0 / 512.0).epsilon(1e-14));
    CHECK(right_extended_size(2) == 35);
    CHECK(lower_neighborhood_size(1) == 5);
    CHECK(extended_half_width_3d(1) == 2);
    CHECK(extended_half_width_3d(2) == 3);
    CHECK(extended_half_width_3d(3) == 5);
    // ln at w=1, tau=5/9: all five nodes alpha.
    CHECK(prob_event_exact(EventKind::ln, 1, Rational(5, 9)) == doctest::Approx(1.0 / 32.0));
    for (int w = 1; w <= 4; ++w) {
        double prev = 1.0;
        for (int i = 1; i < 50; ++i) {
            const double p = prob_event_exact(EventKind::ln, w, Rational(i, 100));
            CHECK(p <= prev + 1e-15);
            prev = p;
        }
    }
    CHECK(prob_event_exact(EventKind::euh, 1, Rational(1, 2), 3) > 0.0);
    CHECK(prob_event_exact(EventKind::uh, 1, Rational(1, 2), 3) ==
          doctest::Approx(binom_below(27, Rational(27, 2))));
    CHECK_THROWS_AS(prob_event_exact(EventKind::rn, 2, Rational(1, 4)), DomainError);
    CHECK_THROWS_AS(prob_event_exact(EventKind::uh, 0, Rational(1, 4)), DomainError);
}

TEST_CASE("ratio bases change sign at the thresholds") {
    const double kappa = kappa_2d().value;
    CHECK(std::abs(u4_base(kappa) - 1.0) < 1e-9);
    int violations = 0;
    for (int i = 1; i < 1000; ++i) {
        const double t = 0.5 * i / 1000.0;
        violations += (u4_base(t) > 1.0) != (t > kappa);
    }
    CHECK(violations == 0);
    for (int i = 1; i < 40; ++i)
        for (int j = 1; j < 40; ++j) {
            const double t = 0.5 * i / 40.0, tb = 0.5 * j / 40.0;
            CHECK((u5_base(t, tb) > 1.0) == suff_less_2d(tb, t));
        }
    // Finite forms approach the limit.
    for (double t : {0.3, 0.4, 0.45}) {
        CHECK(std::abs(u4_base_finite(t, 1e9) - u4_base(t)) < 1e-8);
        CHECK(std::abs(u5_base_finite(t, t - 0.05, 1e9) - u5_base(t, t - 0.05)) < 1e-8);
        CHECK(std::abs(u4_base_finite(t, 100) - u4_base(t)) > 1e-6);
    }
}

TEST_CASE("gamma formula") {
    CHECK(gamma_from(0.44, 0.40) == doctest::Approx(0.525).epsilon(1e-14));
    CHECK(gamma_from(0.3, 0.3 - 1e-6) - 0.5 < 1e-5);
    for (int i = 2; i < 50; ++i)
        for (int j = 1; j < i; ++j)
            CHECK(gamma_from(i / 100.0, j / 100.0) > 0.5);
    CHECK_THROWS_AS(gamma_from(0.4, 0.45), DomainError);
    CHECK_THROWS_AS(gamma_from(0.6, 0.3), DomainError);
}
