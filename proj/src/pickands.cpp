#include "lsx/pickands.hpp"

#include "lsx/error.hpp"
#include "lsx/grid.hpp"
#include "lsx/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace lsx {

namespace {

// Welford accumulator; merge() follows Chan et al. so batch order fixes the result.
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        const double tot = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * n * o.n / tot;
        n = tot;
    }
    double std_error() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

// Index uniform on [0, n) from 53 random bits.
std::size_t uniform_index(Rng& rng, std::size_t n) {
    const double u = double(rng() >> 11) * 0x1.0p-53;
    return std::min(n - 1, static_cast<std::size_t>(u * double(n)));
}

double mixture_draw(std::span<const double> path, std::span<const double> pow, std::size_t j,
                    std::vector<double>& w) {
    const std::size_t n = path.size();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = std::numbers::sqrt2 * path[i] + pow[j] - pow[i > j ? i - j : j - i];
        top = std::max(top, w[i]);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(w[i] - top);
    // N e^{top} / sum e^{w}
    return double(n) / s;
}

}  // namespace

const char* to_string(PickandsMethod m) noexcept {
    return m == PickandsMethod::crude ? "crude" : "mixture";
}

double pickands_functional(std::span<const double> path, std::span<const double> powers,
                           std::size_t limit, std::size_t stride) {
    if (stride == 0 || limit == 0 || limit > path.size() || powers.size() < limit)
        fail(ErrorKind::invalid_argument, "pickands_functional: bad index range");
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < limit; i += stride)
        top = std::max(top, std::numbers::sqrt2 * path[i] - powers[i]);
    return std::exp(top);
}

PickandsEstimate estimate_interval_constant(double alpha, double S, double mesh,
                                            std::size_t n_samples, std::uint64_t seed,
                                            PickandsMethod method, Exec exec,
                                            std::uint64_t stream) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        fail(ErrorKind::invalid_argument, "estimate_interval_constant: alpha must lie in (0, 2]");
    if (!(S >= 0.0) || !std::isfinite(S) || !(mesh > 0.0))
        fail(ErrorKind::invalid_argument, "estimate_interval_constant: need S >= 0 and mesh > 0");
    if (n_samples < 100)
        fail(ErrorKind::invalid_argument, "estimate_interval_constant: need at least 100 samples");

    PickandsEstimate est;
    est.alpha = alpha;
    est.S = S;
    est.mesh = mesh;
    est.n_samples = n_samples;
    est.method = method;
    if (S == 0.0) {
        est.h_interval = 1.0;
        est.h_rate = 0.0;
        est.std_error = 0.0;
        return est;
    }

    const Grid grid = Grid::with_mesh(0.0, S, mesh);
    const FbmSampler sampler(alpha, grid);
    const std::size_t n = grid.size();
    const auto& pow = sampler.powers();

    const BatchPlan plan{n_samples, kDefaultBatch};
    auto parts = map_batches<Moments>(plan, exec, [&](std::size_t b, std::size_t, std::size_t size) {
        auto rng = make_rng({seed, stream, b});
        std::vector<double> buf(2 * n), w(n);
        Moments acc;
        for (std::size_t p = 0; p < size; p += 2) {
            const std::size_t k = std::min<std::size_t>(2, size - p);
            sampler.sample(rng, k, buf);
            for (std::size_t q = 0; q < k; ++q) {
                std::span<const double> path(buf.data() + q * n, n);
                if (method == PickandsMethod::crude) {
                    acc.add(pickands_functional(path, pow, n));
                } else {
                    acc.add(mixture_draw(path, pow, uniform_index(rng, n), w));
                }
            }
        }
        return acc;
    });
    Moments total;
    for (const auto& m : parts) total.merge(m);

    est.h_interval = total.mean;
    est.h_rate = total.mean / S;
    est.std_error = total.std_error();
    return est;
}

PickandsEstimate estimate_pickands(double alpha, std::span<const double> S_ladder, double mesh,
                                   std::size_t n_samples, std::uint64_t seed,
                                   const PickandsOptions& opt) {
    if (S_ladder.size() < 3)
        fail(ErrorKind::invalid_argument, "estimate_pickands: need at least three horizons");
    for (std::size_t i = 0; i < S_ladder.size(); ++i)
        if (!(S_ladder[i] > 0.0) || (i > 0 && !(S_ladder[i] > S_ladder[i - 1])))
            fail(ErrorKind::invalid_argument, "estimate_pickands: horizons must increase and be positive");

    PickandsEstimate last;
    std::vector<PickandsLadderPoint> ladder;
    for (std::size_t i = 0; i < S_ladder.size(); ++i) {
        last = estimate_interval_constant(alpha, S_ladder[i], mesh, n_samples, seed, opt.method,
                                          opt.exec, i);
        ladder.push_back({last.S, last.h_interval, last.h_rate, last.std_error});
    }

    // Weighted least squares on x = 1/S: h_rate = H + C x, weights 1/se(h_rate)^2.
    bool weighted = std::all_of(ladder.begin(), ladder.end(),
                                [](const auto& p) { return p.std_error > 0.0; });
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : ladder) {
        const double w = weighted ? std::pow(p.S / p.std_error, 2) : 1.0;
        const double x = 1.0 / p.S;
        sw += w;
        sx += w * x;
        sy += w * p.h_rate;
        sxx += w * x * x;
        sxy += w * x * p.h_rate;
    }
    const double det = sw * sxx - sx * sx;
    PickandsFit fit;
    const double scale = sw * sxx;
    if (!(det > 1e-12 * scale)) {
        fit.ill_conditioned = true;
    } else {
        fit.value = (sxx * sy - sx * sxy) / det;
        fit.slope = (sw * sxy - sx * sy) / det;
        double chi2 = 0.0;
        for (const auto& p : ladder) {
            const double w = weighted ? std::pow(p.S / p.std_error, 2) : 1.0;
            const double r = p.h_rate - (fit.value + fit.slope / p.S);
            chi2 += w * r * r;
        }
        fit.residual = ladder.size() > 2 ? chi2 / double(ladder.size() - 2) : 0.0;
        if (!(fit.value > 0.0) || !std::isfinite(fit.value)) fit.ill_conditioned = true;
    }
    if (fit.ill_conditioned) fit.value = ladder.back().h_rate;

    last.extrapolated = fit;
    last.ladder = std::move(ladder);
    if (opt.mesh_bias) {
        const auto half = estimate_interval_constant(alpha, last.S, mesh / 2.0, n_samples, seed,
                                                     opt.method, opt.exec, 1000);
        last.mesh_bias = half.h_rate - last.h_rate;
    }
    return last;
}

}  // namespace lsx
