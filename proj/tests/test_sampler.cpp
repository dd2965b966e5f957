#include "lsx/error.hpp"
#include "lsx/raretail.hpp"
#include "lsx/sampler.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace lsx;

namespace {

VarianceProfile flat_variance(double t0) { return {0.0, 1.0, t0, [](double) { return 1.0; }}; }

// Empirical covariance of coordinates (i, j) with a 5-SE tolerance.
struct Cov {
    double value, se;
};

Cov empirical(const GaussianSampler& s, std::size_t i, std::size_t j, std::size_t n, std::uint64_t seed) {
    auto rng = make_rng({seed, 0, 0});
    std::vector<double> buf(s.dim() * 64);
    double sum = 0, sum2 = 0;
    for (std::size_t done = 0; done < n; done += 64) {
        s.sample(rng, 64, buf);
        for (std::size_t p = 0; p < 64; ++p) {
            const double x = buf[p * s.dim() + i] * buf[p * s.dim() + j];
            sum += x;
            sum2 += x * x;
        }
    }
    const double N = double((n + 63) / 64 * 64);
    const double m = sum / N;
    return {m, std::sqrt((sum2 / N - m * m) / N)};
}

}  // namespace

TEST_CASE("grid") {
    const Grid g(0.0, 1.0, 5);
    CHECK(g.mesh() == 0.25);
    CHECK(g[4] == 1.0);
    CHECK(g.points().size() == 5);
    const Grid one(0.5, 0.5, 1);
    CHECK(one.mesh() == 0.0);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 1), Error);
    CHECK_THROWS_AS(Grid(1.0, 0.0, 3), Error);
    CHECK(Grid::with_mesh(0.0, 2.0, 0.25).size() == 9);
    CHECK_THROWS_AS(Grid::with_mesh(0.0, 1.0, 0.3), Error);
    CHECK(recommended_mesh(4.0, 1.0) == doctest::Approx(0.1 / 16));
}

TEST_CASE("fGn autocovariance") {
    const auto g = fgn_autocovariance(1.0, 4);
    CHECK(g[0] == 1.0);
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] == doctest::Approx(0.0));
    const auto h = fgn_autocovariance(1.5, 2);
    CHECK(h[1] == doctest::Approx(0.5 * (std::pow(2.0, 1.5) - 2.0)));
}

TEST_CASE("circulant embedding of fGn is nonnegative definite") {
    for (double alpha : {0.2, 0.5, 1.0, 1.5, 1.9, 2.0}) {
        const CirculantEmbedding e(fgn_autocovariance(alpha, 1024));
        const double top = *std::max_element(e.eigenvalues().begin(), e.eigenvalues().end());
        const double low = *std::min_element(e.eigenvalues().begin(), e.eigenvalues().end());
        CAPTURE(alpha);
        CHECK(low >= -1e-9 * top);
    }
}

TEST_CASE("embedding failure reports the offending eigenvalue") {
    const std::vector<double> bad{1.0, 1.5};
    try {
        CirculantEmbedding e(bad);
        FAIL("expected embedding_failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::embedding_failure);
        CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
    }
}

TEST_CASE("stationary sampler reproduces its autocovariance") {
    const Grid grid(0.0, 1.0, 33);
    const Profile rho = [](double h) { return std::exp(-2.0 * std::abs(h)); };
    const StationarySampler s(grid, rho, std::vector<double>(33, 1.0));
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 0}, {0, 1}, {3, 10}, {0, 32}, {20, 21}}) {
        const auto c = empirical(s, i, j, 40000, 3);
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::abs(c.value - rho(grid[i] - grid[j])) < 5 * c.se);
        CHECK(s.covariance(i, j) == doctest::Approx(rho(grid[i] - grid[j])));
    }
}

TEST_CASE("fBm sampler has the fBm covariance") {
    for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
        const Grid grid(0.0, 2.0, 17);
        const FbmSampler s(alpha, grid);
        for (auto [i, j] : {std::pair<std::size_t, std::size_t>{16, 16}, {4, 9}, {1, 16}}) {
            const double ref = 0.5 * (std::pow(grid[i], alpha) + std::pow(grid[j], alpha) -
                                      std::pow(std::abs(grid[i] - grid[j]), alpha));
            CHECK(s.covariance(i, j) == doctest::Approx(ref).epsilon(1e-12));
            const auto c = empirical(s, i, j, 40000, 5);
            CAPTURE(alpha);
            CAPTURE(i);
            CAPTURE(j);
            CHECK(std::abs(c.value - ref) < 5 * c.se + 1e-12);
        }
    }
    CHECK_THROWS_AS(FbmSampler(2.5, Grid(0.0, 1.0, 3)), Error);
    CHECK_THROWS_AS(FbmSampler(1.0, Grid(0.5, 1.0, 3)), Error);
}

TEST_CASE("fbm_path is seeded and starts at zero") {
    const Grid grid(0.0, 1.0, 65);
    const auto a = fbm_path(1.2, grid, 42);
    const auto b = fbm_path(1.2, grid, 42);
    const auto c = fbm_path(1.2, grid, 43);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.values[0] == 0.0);
    CHECK(a.lineage == SeedLineage{42, 0, 0});
    CHECK_THROWS_AS(fbm_path(1.0, Grid(0.0, 0.0, 1), 1), Error);
}

TEST_CASE("dense factorization: jitter ladder and failures") {
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 3);
    const auto c = CovarianceMatrix::factorize({0, 1, 2}, ones);
    CHECK(c.jitter() > 0.0);
    CHECK(c.jitter() <= 1e-10 * 3.0 / 3.0 * 1.0000001);
    CHECK((c.factor() * c.factor().transpose() - ones).cwiseAbs().maxCoeff() < 1e-9);

    Eigen::MatrixXd pd(2, 2);
    pd << 2.0, 0.5, 0.5, 1.0;
    CHECK(CovarianceMatrix::factorize({0, 1}, pd).jitter() == 0.0);

    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;
    try {
        (void)CovarianceMatrix::factorize({0, 1}, indef);
        FAIL("expected not_positive_definite");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::not_positive_definite);
        CHECK(std::string(e.what()).find("eigenvalue") != std::string::npos);
    }
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.2, 0.3, 1.0;
    CHECK_THROWS_AS(CovarianceMatrix::factorize({0, 1}, asym), Error);
}

TEST_CASE("dense sampler covariance") {
    Eigen::MatrixXd m(3, 3);
    m << 1.0, 0.6, 0.2, 0.6, 2.0, -0.3, 0.2, -0.3, 0.5;
    const DenseSampler s(CovarianceMatrix::factorize({0, 1, 2}, m));
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const auto c = empirical(s, i, j, 60000, 8);
            CAPTURE(i);
            CAPTURE(j);
            CHECK(std::abs(c.value - m(i, j)) < 5 * c.se);
        }
}

TEST_CASE("sample_paths is identical for the serial reference and the parallel driver") {
    const auto spec = make_stationary_powexp_spec({0, 1}, 1.0, 1.0, flat_variance(0.5));
    const auto cov = covariance_on_grid(spec, Grid(0, 1, 20));
    const auto a = sample_paths(cov, 1500, 9, Exec::serial);
    set_threads(4);
    const auto b = sample_paths(cov, 1500, 9, Exec::parallel);
    set_threads(1);
    const auto c = sample_paths(cov, 1500, 9, Exec::parallel);
    REQUIRE(a.size() == 1500);
    for (std::size_t p = 0; p < a.size(); ++p) {
        REQUIRE(a[p].values == b[p].values);
        REQUIRE(a[p].values == c[p].values);
    }
    CHECK(a[1499].lineage == SeedLineage{9, 0, 1499 / kDefaultBatch});
}

TEST_CASE("make_sampler dispatch") {
    const auto stat = make_stationary_powexp_spec({0, 1}, 1.0, 1.0, flat_variance(0.5));
    CHECK(dynamic_cast<StationarySampler*>(make_sampler(stat, Grid(0, 1, 64)).get()));
    IndexProfile index{1.0, 0.2, 1.0, 1.0, index_power(1.0, 0.2, 1.0, 0.5)};
    const auto non = make_powexp_spec({0, 1}, index, {1.0, 1.0, 0.5, variance_bump(1.0, 1.0, 0.5)},
                                      {1.0, [](double) { return 1.0; }});
    CHECK(dynamic_cast<DenseSampler*>(make_sampler(non, Grid(0, 1, 64)).get()));
    CHECK_THROWS_AS(make_sampler(stat, Grid(0, 2, 8)), Error);
    const auto pts = make_sampler(non, std::vector<double>{0.1, 0.4, 0.45});
    CHECK(pts->dim() == 3);
    CHECK(pts->covariance(0, 1) == doctest::Approx(non.covariance(0.1, 0.4)));
}

TEST_CASE("comparison processes") {
    const auto p = RegimeParams::make(1.0, 1.0, 0.05, 1.0, 1.0, 1.0, 2.0, 4.0);
    const Grid g(0, 4, 9);
    const auto lo = comparison_process_cov(ComparisonKind::lower, 0.3, 3.0, p, 4.0, 0.5, g);
    const auto up = comparison_process_cov(ComparisonKind::upper, 0.3, 3.0, p, 4.0, 0.5, g);
    const double ex = 1.0 + 2 * 0.05 * 0.5;
    CHECK(lo(0, 8) == doctest::Approx(1 - 0.7 / 9 * std::pow(4.0, ex)));
    CHECK(up(0, 8) == doctest::Approx(1 - 1.3 / 9 * 4.0));
    CHECK_THROWS_AS(comparison_process_cov(ComparisonKind::lower, 1.0, 3.0, p, 4.0, 0.5, g), Error);
    const auto steep = RegimeParams::make(1.9, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 4.0);
    CHECK_THROWS_AS(comparison_process_cov(ComparisonKind::lower, 0.3, 3.0, steep, 4.0, 0.5, g), Error);
    CHECK_THROWS_AS(comparison_process_cov(ComparisonKind::upper, 0.3, 3.0, p, 2.0, 0.5, g), Error);
}

TEST_CASE("paths CSV") {
    const auto spec = make_stationary_powexp_spec({0, 1}, 1.0, 1.0, flat_variance(0.5));
    const auto paths = sample_paths(covariance_on_grid(spec, Grid(0, 1, 4)), 2, 1);
    std::ostringstream os;
    write_paths_csv(os, paths);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,value,path_id");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 8);
    CHECK(os.str().find("\n1,") != std::string::npos);
}
