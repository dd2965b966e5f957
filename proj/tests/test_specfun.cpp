#include "lsx/error.hpp"
#include "lsx/specfun.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

namespace sf = lsx::specfun;

namespace {

// mpmath at 40 digits: (u, Psi(u), log Psi(u))
struct SurvivalRef {
    double u, psi, log_psi;
};
constexpr SurvivalRef kSurvival[] = {
    {-1.0, 0.84134474606854294859, -0.17275377902344988953},
    {0.0, 0.5, -0.69314718055994530942},
    {0.5, 0.30853753872598689636, -1.1759117615936186089},
    {1.5, 0.066807201268858066004, -2.705944400823889807},
    {3.0, 0.0013498980316300945267, -6.6077262215103495433},
    {5.0, 2.8665157187919391167e-7, -15.064998393988725736},
    {8.0, 6.2209605742717841235e-16, -35.013437159914549896},
    {12.0, 1.7764821120776789977e-33, -75.410673001568795939},
    {20.0, 2.7536241186062336951e-89, -203.91715537109726394},
    {37.0, 5.7255712225245768227e-300, -689.0305855768905936},
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("survival matches high-precision values across the tail") {
    for (const auto& r : kSurvival) {
        CAPTURE(r.u);
        CHECK(rel(sf::survival(r.u), r.psi) < 1e-13);
        CHECK(rel(sf::log_survival(r.u), r.log_psi) < 1e-13);
    }
}

TEST_CASE("log_survival continues past the underflow point") {
    CHECK(rel(sf::log_survival(40.0), -804.60844201375378817) < 1e-12);
    CHECK(rel(sf::log_survival(60.0), -1805.0135606805671387) < 1e-12);
    CHECK(std::isfinite(sf::log_survival(1e6)));
}

TEST_CASE("survival_checked flags the underflow range") {
    CHECK_FALSE(sf::survival_checked(37.0).underflow);
    const auto v = sf::survival_checked(39.0);
    CHECK(v.underflow);
    CHECK(v.value >= 0.0);
    CHECK(v.value < 1e-300);
}

TEST_CASE("survival rejects NaN") {
    CHECK_THROWS_AS(sf::survival(std::nan("")), lsx::Error);
}

TEST_CASE("regularized lower incomplete gamma") {
    struct Ref { double a, x, p; };
    // mpmath gammainc(a, 0, x, regularized=True)
    constexpr Ref refs[] = {
        {0.5, 0.1, 0.34527915398142297956}, {0.5, 3.0, 0.98569412156457036047},
        {2.0, 1.0, 0.26424111765711535681}, {2.0, 10.0, 0.99950060077261266663},
        {0.2, 0.01, 0.43286756092652501165}, {5.0, 3.0, 0.18473675547622793371},
        {5.0, 9.0, 0.94503635850489509564},
    };
    for (const auto& r : refs) {
        CAPTURE(r.a);
        CAPTURE(r.x);
        CHECK(rel(sf::gamma_p(r.a, r.x), r.p) < 1e-13);
    }
    CHECK(sf::gamma_p(1.5, 0.0) == 0.0);
    CHECK(sf::gamma_p(1.5, sf::kInf) == 1.0);
    CHECK_THROWS_AS(sf::gamma_p(0.0, 1.0), lsx::Error);
    CHECK_THROWS_AS(sf::gamma_p(1.0, -1.0), lsx::Error);
}

TEST_CASE("gamma_p agrees with Boost on a random sweep") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ua(0.05, 20.0), ux(0.0, 40.0);
    for (int i = 0; i < 500; ++i) {
        const double a = ua(rng), x = ux(rng);
        const double ref = boost::math::gamma_p(a, x);
        CAPTURE(a);
        CAPTURE(x);
        CHECK(std::abs(sf::gamma_p(a, x) - ref) <= 1e-13 * std::max(ref, 1e-300) + 1e-300);
    }
}

TEST_CASE("gamma_lower is P times Gamma") {
    CHECK(rel(sf::gamma_lower(2.0, 1.0), 1.0 - 2.0 / std::exp(1.0)) < 1e-14);
}

TEST_CASE("regime integral in closed form") {
    struct Ref { double b, beta, alpha, L, v; };
    // mpmath quad of exp(-(2b/alpha^2) x^beta) on [0, L]
    constexpr Ref refs[] = {
        {1.0, 1.0, 1.0, 1.0, 0.43233235838169365405},
        {0.5, 2.0, 1.5, 0.7, 0.65233998090250819444},
        {2.0, 0.5, 0.8, sf::kInf, 0.0512},
        {0.1, 3.0, 1.0, 2.0, 1.4623105756059482773},
    };
    for (const auto& r : refs) CHECK(rel(sf::regime_integral(r.b, r.beta, r.alpha, r.L), r.v) < 1e-13);
    CHECK(sf::regime_integral(1.0, 1.0, 1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(sf::regime_integral(0.0, 1.0, 1.0, 1.0), lsx::Error);
    CHECK_THROWS_AS(sf::regime_integral(1.0, -1.0, 1.0, 1.0), lsx::Error);
    CHECK_THROWS_AS(sf::regime_integral(1.0, 1.0, 1.0, -1.0), lsx::Error);
}

TEST_CASE("regime integral against adaptive quadrature") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ub(0.05, 3.0), ubeta(0.2, 5.0), ual(0.2, 1.99), uL(0.01, 3.0);
    for (int i = 0; i < 50; ++i) {
        const double b = ub(rng), beta = ubeta(rng), alpha = ual(rng), L = uL(rng);
        CAPTURE(b);
        CAPTURE(beta);
        CAPTURE(alpha);
        CAPTURE(L);
        CHECK(rel(sf::regime_integral(b, beta, alpha, L), oracle::regime_integral(b, beta, alpha, L)) < 1e-10);
    }
}

TEST_CASE("mfbm normalizer") {
    struct Ref { double x, d; };
    constexpr Ref refs[] = {{0.2, 22.144965114057817854}, {1.0, 6.2831853071795864769},
                            {1.5, 6.6843420656826680064}, {1.9, 21.97983773599340294}};
    for (const auto& r : refs) CHECK(rel(sf::mfbm_normalizer(r.x), r.d) < 1e-13);
    CHECK_THROWS_AS(sf::mfbm_normalizer(0.0), lsx::Error);
    CHECK_THROWS_AS(sf::mfbm_normalizer(2.0), lsx::Error);
    CHECK_THROWS_AS(sf::mfbm_normalizer(-0.5), lsx::Error);
}
