#include "lsx/error.hpp"
#include "lsx/pickands.hpp"

#include <doctest.h>

#include <cmath>

using namespace lsx;

// For alpha = 2, B(t) = t Z and sup_t (sqrt2 t Z - t^2) has a closed form, giving
// H_2[0, S] = 1 + S / sqrt(pi) exactly.
TEST_CASE("alpha = 2 interval constant matches its closed form") {
    const double S = 4.0;
    for (auto method : {PickandsMethod::crude, PickandsMethod::mixture}) {
        const auto e = estimate_interval_constant(2.0, S, 1.0 / 16, 20000, 3, method);
        CAPTURE(to_string(method));
        CHECK(std::abs(e.h_interval - (1.0 + S / std::sqrt(M_PI))) < 4 * e.std_error + 1e-3);
        CHECK(e.h_rate == doctest::Approx(e.h_interval / S));
    }
}

TEST_CASE("S = 0 is the single point t = 0") {
    const auto e = estimate_interval_constant(1.0, 0.0, 0.1, 100, 1);
    CHECK(e.h_interval == 1.0);
    CHECK(e.std_error == 0.0);
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(estimate_interval_constant(1.0, 1.0, 0.1, 99, 1), Error);
    CHECK_THROWS_AS(estimate_interval_constant(2.5, 1.0, 0.1, 1000, 1), Error);
    CHECK_THROWS_AS(estimate_interval_constant(1.0, 1.0, 0.3, 1000, 1), Error);
    CHECK_THROWS_AS(estimate_interval_constant(1.0, -1.0, 0.1, 1000, 1), Error);
    const std::vector<double> two{1, 2}, flat{1, 2, 2};
    CHECK_THROWS_AS(estimate_pickands(1.0, two, 0.1, 1000, 1), Error);
    CHECK_THROWS_AS(estimate_pickands(1.0, flat, 0.1, 1000, 1), Error);
}

TEST_CASE("pickands functional") {
    const std::vector<double> path{0.0, 1.0, -1.0, 2.0};
    const std::vector<double> pow{0.0, 0.25, 0.5, 0.75};
    CHECK(pickands_functional(path, pow, 4) == doctest::Approx(std::exp(std::sqrt(2.0) * 2.0 - 0.75)));
    CHECK(pickands_functional(path, pow, 3) == doctest::Approx(std::exp(std::sqrt(2.0) - 0.25)));
    CHECK(pickands_functional(path, pow, 4, 2) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pickands_functional(path, pow, 5), Error);
    CHECK_THROWS_AS(pickands_functional(path, pow, 4, 0), Error);
}

TEST_CASE("crude and mixture estimators agree") {
    for (double alpha : {0.6, 1.0, 1.5}) {
        const auto c = estimate_interval_constant(alpha, 2.0, 1.0 / 32, 40000, 11, PickandsMethod::crude);
        const auto m = estimate_interval_constant(alpha, 2.0, 1.0 / 32, 40000, 12, PickandsMethod::mixture);
        CAPTURE(alpha);
        CHECK(std::abs(c.h_interval - m.h_interval) < 3 * std::hypot(c.std_error, m.std_error));
        // the mixture draw is bounded by the number of grid points
        CHECK(m.h_interval <= 2.0 * 32 + 1);
        CHECK(m.std_error < c.std_error);
    }
}

TEST_CASE("serial reference and parallel driver give identical estimates") {
    for (auto method : {PickandsMethod::crude, PickandsMethod::mixture}) {
        const auto a = estimate_interval_constant(1.3, 4.0, 1.0 / 16, 3000, 5, method, Exec::serial);
        set_threads(3);
        const auto b = estimate_interval_constant(1.3, 4.0, 1.0 / 16, 3000, 5, method, Exec::parallel);
        set_threads(1);
        CHECK(a.h_interval == b.h_interval);
        CHECK(a.std_error == b.std_error);
    }
}

TEST_CASE("extrapolation recovers 1/sqrt(pi) for alpha = 2") {
    const std::vector<double> S{2, 4, 8};
    PickandsOptions opt;
    opt.mesh_bias = true;
    const auto e = estimate_pickands(2.0, S, 1.0 / 16, 20000, 21, opt);
    REQUIRE(e.extrapolated);
    CHECK_FALSE(e.extrapolated->ill_conditioned);
    CHECK(std::abs(e.extrapolated->value - 1.0 / std::sqrt(M_PI)) < 0.02);
    CHECK(e.extrapolated->slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK(e.ladder.size() == 3);
    CHECK(e.S == 8.0);
    REQUIRE(e.mesh_bias);
    CHECK(std::abs(*e.mesh_bias) < 0.02);
}

// On a grid of spacing d, sqrt2 B(t) - t is a Gaussian random walk and Spitzer's
// identity gives the discrete constant exp(-2 sum_k Psi(sqrt(k d / 2)) / k) / d.
// Value for d = 1/16 from mpmath.
TEST_CASE("alpha = 1 extrapolation recovers the grid constant") {
    constexpr double kGrid16 = 0.8139742310693450743;
    const std::vector<double> S{4, 8, 16, 32};
    const auto e = estimate_pickands(1.0, S, 1.0 / 16, 20000, 4);
    REQUIRE(e.extrapolated);
    CHECK(std::abs(e.extrapolated->value - kGrid16) < 0.02);
}
