#include <catch2/catch.hpp>

#include <cmath>

#include "rtq/appendix.hpp"

using namespace rtq;

namespace {
// The worked example: tau=1, tau*=1, d=2, d*=1, d'=1, mu=1, so a=1, b=2.
AppendixScenario example() { return {1.0, 1.0, 2.0, 1.0, 1.0, 1.0}; }
} // namespace

TEST_CASE("scenario invariants are enforced") {
    CHECK_NOTHROW(example().validate());
    AppendixScenario bad = example();
    bad.tau = 2.5; // tau >= d
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = example();
    bad.tau_star = 5.0; // tau + tau* >= d + d*
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = example();
    bad.d_prime = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("derived interval endpoints of the worked example") {
    const AppendixScenario s = example();
    CHECK(s.a() == 1.0);
    CHECK(s.b() == 2.0);
    CHECK(event_probability(s) == Approx(std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("closed-form event probability matches the double integral") {
    const AppendixScenario scenarios[] = {
        example(),
        {0.5, 0.7, 1.4, 0.9, 0.6, 1.3},
        {1.2, 0.4, 2.0, 1.5, 0.3, 0.8},
    };
    for (const AppendixScenario& s : scenarios) {
        s.validate();
        CHECK(event_probability_quadrature(s) ==
              Approx(event_probability(s)).epsilon(1e-9));
    }
}

TEST_CASE("conditional cdfs hit their boundary values exactly") {
    const AppendixScenario s = example();
    CHECK(cdf_x_given_e(s, 0.0) == 0.0);
    CHECK(cdf_x_given_e(s, s.a()) == 1.0);
    CHECK(cdf_x_given_e(s, s.a() + 1.0) == 1.0);
    CHECK(cdf_xprime_given_e(s, s.b() - s.a()) == 0.0);
    CHECK(cdf_xprime_given_e(s, s.b()) == 1.0);
}

TEST_CASE("the shifted cdf is dominated over its trivial ranges") {
    const AppendixScenario s = example();
    // t <= b-a: F_X' is zero while F_X is nonnegative.
    CHECK(cdf_xprime_given_e(s, 0.5) == 0.0);
    CHECK(cdf_x_given_e(s, 0.5) >= 0.0);
    // t > a: F_X is one, an upper bound for any cdf.
    CHECK(cdf_x_given_e(s, 1.5) == 1.0);
    CHECK(cdf_xprime_given_e(s, 1.5) <= 1.0);
}

TEST_CASE("density integrates to the closed-form cdf") {
    const AppendixScenario s = example();
    for (double t : {0.2, 0.5, 0.8, 1.0}) {
        const double integral = adaptive_simpson(
            [&](double x) { return pdf_x_given_e(s, x); }, 0.0, t, 1e-12);
        CHECK(integral == Approx(cdf_x_given_e(s, t)).margin(1e-6));
    }
}

TEST_CASE("the sufficient-condition inequality holds for arbitrary gaps") {
    RandomStream s(5);
    for (int i = 0; i < 5000; ++i) {
        const double z = 20.0 * s.next_unit(); // mu * (b - a)
        CHECK(std::exp(-z) >= 1.0 - z);
    }
}

TEST_CASE("closed-form conditional means match quadrature of the density") {
    const AppendixScenario scenarios[] = {
        example(),
        {0.5, 0.7, 1.4, 0.9, 0.6, 1.3},
        {1.2, 0.4, 2.0, 1.5, 0.3, 0.8},
    };
    for (const AppendixScenario& s : scenarios) {
        const double by_quadrature = adaptive_simpson(
            [&](double x) { return x * pdf_x_given_e(s, x); }, 0.0, s.a(), 1e-12);
        CHECK(mean_x_given_e(s) == Approx(by_quadrature).epsilon(1e-9));
        CHECK(mean_xprime_given_e(s) ==
              Approx(by_quadrature + s.b() - s.a()).epsilon(1e-9));
    }
}

TEST_CASE("full dominance check passes on the worked example") {
    AppendixCheckOptions opt;
    opt.mc_accepted = 100000; // unit-test scale; the acceptance suite uses 1e6
    opt.seed = 91;
    const AppendixReport rep = appendix_dominance_check(example(), opt);
    CHECK(rep.cdfs_valid);
    CHECK(rep.dominance_holds);
    CHECK(rep.min_dominance_margin >= -1e-12);
    CHECK(rep.sufficient_condition_holds);
    CHECK(rep.mc_mean_sigma_x <= 3.0);
    CHECK(rep.mc_mean_sigma_xprime <= 3.0);
    CHECK(rep.mc_dkw_ok);
    CHECK(rep.ok());
    CHECK(rep.p_event == Approx(rep.p_event_quadrature).epsilon(1e-9));
}

TEST_CASE("the rejection sampler gives up on vanishing events") {
    AppendixScenario s = example();
    s.d_prime = 40.0; // pushes b out, P(E) ~ e^{-41}
    s.validate();
    CHECK_THROWS_AS(rejection_sample_event(s, 1000, 1, /*max_draws=*/100000),
                    std::runtime_error);
}
