// Serial reference vs OpenMP batch driver for the hot Monte Carlo kernels,
// plus the circulant vs dense samplers on the same stationary grid.
#include "lsx/pickands.hpp"
#include "lsx/raretail.hpp"
#include "lsx/sampler.hpp"

#include <benchmark/benchmark.h>

namespace {

lsx::Exec exec_of(const benchmark::State& st) {
    return st.range(0) == 0 ? lsx::Exec::serial : lsx::Exec::parallel;
}

void BM_PickandsInterval(benchmark::State& st) {
    for (auto _ : st) {
        auto e = lsx::estimate_interval_constant(1.0, 16.0, 1.0 / 64, 4096, 7,
                                                 lsx::PickandsMethod::mixture, exec_of(st));
        benchmark::DoNotOptimize(e.h_interval);
    }
    st.SetLabel(st.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_PickandsInterval)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ImportanceTail(benchmark::State& st) {
    const auto spec = lsx::make_stationary_powexp_spec({0.0, 1.0}, 1.0, 1.0, {0.0, 1.0, 0.5, [](double) { return 1.0; }});
    const lsx::Grid grid(0.0, 1.0, 512);
    for (auto _ : st) {
        auto t = lsx::importance_tail(spec, grid, 3.5, 4096, 11, lsx::TiltPolicy::mixture, exec_of(st));
        benchmark::DoNotOptimize(t.p_hat);
    }
    st.SetLabel(st.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_ImportanceTail)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// range(0): 0 = circulant, 1 = dense Cholesky; range(1): grid points
void BM_StationarySampling(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(1));
    const lsx::Grid grid(0.0, 1.0, n);
    const lsx::Profile rho = [](double h) { return std::exp(-std::abs(h)); };
    std::unique_ptr<lsx::GaussianSampler> s;
    if (st.range(0) == 0) {
        s = std::make_unique<lsx::StationarySampler>(grid, rho, std::vector<double>(n, 1.0));
    } else {
        Eigen::MatrixXd m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = rho(grid[i] - grid[j]);
        s = std::make_unique<lsx::DenseSampler>(lsx::CovarianceMatrix::factorize(grid.points(), m, grid));
    }
    auto rng = lsx::make_rng({3, 0, 0});
    std::vector<double> out(64 * n);
    for (auto _ : st) {
        s->sample(rng, 64, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * 64);
    st.SetLabel(st.range(0) == 0 ? "circulant" : "dense");
}
BENCHMARK(BM_StationarySampling)->ArgsProduct({{0, 1}, {256, 1024}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
