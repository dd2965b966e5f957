#include "lsx/sampler.hpp"

#include "lsx/csv.hpp"
#include "lsx/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace lsx {

// --- Grid -------------------------------------------------------------------

Grid::Grid(double start, double end, std::size_t n) : start_(start), end_(end), n_(n) {
    if (n == 0) fail(ErrorKind::invalid_argument, "Grid: need at least one point");
    if (!std::isfinite(start) || !std::isfinite(end))
        fail(ErrorKind::invalid_argument, "Grid: endpoints must be finite");
    if (n == 1 && start != end)
        fail(ErrorKind::invalid_argument, "Grid: a single-point grid needs start == end");
    if (n >= 2 && !(end > start))
        fail(ErrorKind::invalid_argument, "Grid: need end > start");
}

Grid Grid::with_mesh(double start, double end, double mesh) {
    if (!(mesh > 0.0)) fail(ErrorKind::invalid_argument, "Grid: mesh must be positive");
    const double steps = (end - start) / mesh;
    const double r = std::round(steps);
    if (std::abs(steps - r) > 1e-9 * std::max(1.0, r))
        fail(ErrorKind::invalid_argument, "Grid: mesh does not divide the interval");
    return Grid(start, end, static_cast<std::size_t>(r) + 1);
}

std::vector<double> Grid::points() const {
    std::vector<double> p(n_);
    for (std::size_t i = 0; i < n_; ++i) p[i] = (*this)[i];
    return p;
}

double path_supremum(const GridPath& path) {
    if (path.values.empty()) fail(ErrorKind::invalid_argument, "path_supremum: empty path");
    return *std::max_element(path.values.begin(), path.values.end());
}

double recommended_mesh(double u, double alpha) {
    return 0.1 * std::pow(u, -2.0 / alpha);
}

// --- CovarianceMatrix -------------------------------------------------------

CovarianceMatrix CovarianceMatrix::factorize(std::vector<double> times, Eigen::MatrixXd m,
                                             std::optional<Grid> grid) {
    const auto n = static_cast<Eigen::Index>(times.size());
    if (m.rows() != n || m.cols() != n)
        fail(ErrorKind::invalid_argument, "CovarianceMatrix: shape mismatch");
    if (!m.allFinite()) fail(ErrorKind::model, "CovarianceMatrix: non-finite entries");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        fail(ErrorKind::model, "CovarianceMatrix: matrix is not symmetric");

    CovarianceMatrix c;
    c.times_ = std::move(times);
    c.grid_ = std::move(grid);
    const double scale = m.trace() / double(n);
    for (double step : {0.0, 1e-14, 1e-12, 1e-10}) {
        Eigen::MatrixXd trial = m;
        trial.diagonal().array() += step * scale;
        Eigen::LLT<Eigen::MatrixXd> llt(trial);
        if (llt.info() == Eigen::Success) {
            c.jitter_ = step * scale;
            c.l_ = llt.matrixL();
            c.m_ = std::move(m);
            return c;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    std::ostringstream os;
    os << "covariance is not positive definite: most negative eigenvalue "
       << es.eigenvalues().minCoeff() << " (trace/n = " << scale << ")";
    fail(ErrorKind::not_positive_definite, os.str());
}

// --- samplers -----------------------------------------------------------------

void DenseSampler::sample(Rng& rng, std::size_t count, std::span<double> out) const {
    const auto n = static_cast<Eigen::Index>(dim());
    if (out.size() < count * dim()) fail(ErrorKind::invalid_argument, "sample: output too small");
    std::normal_distribution<double> z;
    Eigen::MatrixXd draws(n, static_cast<Eigen::Index>(count));
    for (Eigen::Index p = 0; p < draws.cols(); ++p)
        for (Eigen::Index i = 0; i < n; ++i) draws(i, p) = z(rng);
    Eigen::Map<Eigen::MatrixXd> x(out.data(), n, static_cast<Eigen::Index>(count));
    x.noalias() = cov_.factor().triangularView<Eigen::Lower>() * draws;
}

namespace {

std::vector<double> stationary_acf(const Grid& grid, const Profile& rho) {
    std::vector<double> acf(grid.size() + 1);
    for (std::size_t k = 0; k < acf.size(); ++k) acf[k] = k == 0 ? 1.0 : rho(double(k) * grid.mesh());
    return acf;
}

// Draws `count` sequences in pairs; an odd tail discards the imaginary half.
template <class Emit>
void draw_pairs(const CirculantEmbedding& embed, Rng& rng, std::size_t count, Emit emit) {
    auto ws = embed.make_workspace();
    std::vector<double> a(embed.length()), b(embed.length());
    for (std::size_t p = 0; p < count; p += 2) {
        embed.draw_pair(rng, ws, a, b);
        emit(p, a);
        if (p + 1 < count) emit(p + 1, b);
    }
}

}  // namespace

StationarySampler::StationarySampler(const Grid& grid, const Profile& rho, std::vector<double> sigma)
    : sigma_(std::move(sigma)), acf_(stationary_acf(grid, rho)), embed_(acf_) {
    if (sigma_.size() != grid.size())
        fail(ErrorKind::invalid_argument, "StationarySampler: sigma size mismatch");
}

void StationarySampler::sample(Rng& rng, std::size_t count, std::span<double> out) const {
    const std::size_t n = dim();
    if (out.size() < count * n) fail(ErrorKind::invalid_argument, "sample: output too small");
    draw_pairs(embed_, rng, count, [&](std::size_t p, const std::vector<double>& y) {
        double* dst = out.data() + p * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] = sigma_[i] * y[i];
    });
}

std::vector<double> fgn_autocovariance(double alpha, std::size_t n) {
    std::vector<double> g(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double kk = double(k);
        g[k] = 0.5 * (std::pow(kk + 1.0, alpha) - 2.0 * std::pow(kk, alpha) +
                      std::pow(std::abs(kk - 1.0), alpha));
    }
    return g;
}

FbmSampler::FbmSampler(double alpha, const Grid& grid)
    : alpha_(alpha), mesh_(grid.mesh()), n_(grid.size()) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        fail(ErrorKind::invalid_argument, "fbm: alpha must lie in (0, 2]");
    if (grid.start() != 0.0) fail(ErrorKind::invalid_argument, "fbm: grid must start at 0");
    pow_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) pow_[k] = std::pow(double(k) * mesh_, alpha);
    if (n_ >= 2) embed_.emplace(fgn_autocovariance(alpha, n_ - 1));
}

double FbmSampler::covariance(std::size_t i, std::size_t j) const {
    return 0.5 * (pow_[i] + pow_[j] - pow_[i > j ? i - j : j - i]);
}

void FbmSampler::sample(Rng& rng, std::size_t count, std::span<double> out) const {
    if (out.size() < count * n_) fail(ErrorKind::invalid_argument, "sample: output too small");
    if (!embed_) {
        std::fill_n(out.begin(), count * n_, 0.0);
        return;
    }
    const double scale = std::pow(mesh_, alpha_ / 2.0);
    draw_pairs(*embed_, rng, count, [&](std::size_t p, const std::vector<double>& inc) {
        double* dst = out.data() + p * n_;
        double acc = 0.0;
        dst[0] = 0.0;
        for (std::size_t i = 1; i < n_; ++i) {
            acc += inc[i - 1];
            dst[i] = scale * acc;
        }
    });
}

GridPath fbm_path(double alpha, const Grid& grid, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        fail(ErrorKind::invalid_argument, "fbm_path: alpha must lie in (0, 2]");
    if (grid.size() < 2) fail(ErrorKind::invalid_argument, "fbm_path: need at least two points");
    FbmSampler s(alpha, grid);
    SeedLineage lineage{seed, 0, 0};
    auto rng = make_rng(lineage);
    GridPath path{grid, std::vector<double>(grid.size()), lineage};
    s.sample(rng, 1, path.values);
    return path;
}

// --- assembly -------------------------------------------------------------------

namespace {

Eigen::MatrixXd assemble(const ProcessSpec& spec, const std::vector<double>& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    for (double x : t)
        if (!spec.horizon().contains(x))
            fail(ErrorKind::invalid_argument, "covariance: point outside the horizon");
    std::vector<double> sig(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) sig[i] = spec.sigma(t[i]);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = sig[i] * sig[i];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = sig[i] * sig[j] * spec.correlation(t[i], t[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

}  // namespace

CovarianceMatrix covariance_on_grid(const ProcessSpec& spec, const Grid& grid) {
    auto t = grid.points();
    auto m = assemble(spec, t);
    return CovarianceMatrix::factorize(std::move(t), std::move(m), grid);
}

CovarianceMatrix covariance_on_points(const ProcessSpec& spec, std::vector<double> times) {
    auto m = assemble(spec, times);
    return CovarianceMatrix::factorize(std::move(times), std::move(m));
}

std::vector<GridPath> sample_paths(const CovarianceMatrix& cov, std::size_t count,
                                   std::uint64_t seed, Exec exec) {
    if (!cov.grid()) fail(ErrorKind::invalid_argument, "sample_paths: covariance has no grid");
    DenseSampler sampler(cov);
    const std::size_t n = cov.size();
    BatchPlan plan{count, kDefaultBatch};
    auto batches = map_batches<std::vector<double>>(plan, exec, [&](std::size_t b, std::size_t, std::size_t size) {
        auto rng = make_rng({seed, 0, b});
        std::vector<double> buf(size * n);
        sampler.sample(rng, size, buf);
        return buf;
    });
    std::vector<GridPath> out;
    out.reserve(count);
    for (std::size_t b = 0; b < batches.size(); ++b) {
        for (std::size_t p = 0; p < plan.size(b); ++p) {
            const auto first = batches[b].begin() + static_cast<std::ptrdiff_t>(p * n);
            out.push_back({*cov.grid(), std::vector<double>(first, first + static_cast<std::ptrdiff_t>(n)),
                           SeedLineage{seed, 0, b}});
        }
    }
    return out;
}

std::unique_ptr<GaussianSampler> make_sampler(const ProcessSpec& spec, const Grid& grid) {
    if (spec.stationary_correlation() && grid.size() >= 2) {
        auto t = grid.points();
        for (double x : t)
            if (!spec.horizon().contains(x))
                fail(ErrorKind::invalid_argument, "sampler: grid point outside the horizon");
        std::vector<double> sig(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) sig[i] = spec.sigma(t[i]);
        try {
            return std::make_unique<StationarySampler>(grid, *spec.stationary_correlation(), std::move(sig));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::embedding_failure) throw;
        }
    }
    return std::make_unique<DenseSampler>(covariance_on_grid(spec, grid));
}

std::unique_ptr<GaussianSampler> make_sampler(const ProcessSpec& spec, std::vector<double> times) {
    return std::make_unique<DenseSampler>(covariance_on_points(spec, std::move(times)));
}

CovarianceMatrix comparison_process_cov(ComparisonKind kind, double nu, double u,
                                        const RegimeParams& p, double S, double window,
                                        const Grid& grid) {
    if (!(nu > 0.0 && nu < 1.0))
        fail(ErrorKind::invalid_argument, "comparison_process_cov: nu must lie in (0, 1)");
    if (!(u > 0.0) || !(S > 0.0) || !(window > 0.0))
        fail(ErrorKind::invalid_argument, "comparison_process_cov: u, S and window must be positive");
    if (grid.start() < 0.0 || grid.end() > S * (1.0 + 1e-12))
        fail(ErrorKind::invalid_argument, "comparison_process_cov: grid must lie in [0, S]");
    double exponent = p.alpha0;
    double theta = p.a0 / (u * u);
    if (kind == ComparisonKind::lower) {
        exponent += 2.0 * p.b * std::pow(window, p.beta);
        if (exponent > 2.0)
            fail(ErrorKind::invalid_argument,
                 "comparison_process_cov: alpha + 2 b window^beta exceeds 2");
        theta *= 1.0 - nu;
    } else {
        theta *= 1.0 + nu;
    }
    auto t = grid.points();
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = 1.0 - theta * std::pow(std::abs(t[i] - t[j]), exponent);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return CovarianceMatrix::factorize(std::move(t), std::move(m), grid);
}

void write_paths_csv(std::ostream& os, std::span<const GridPath> paths) {
    os << "t,value,path_id\n";
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const auto& path = paths[p];
        for (std::size_t i = 0; i < path.values.size(); ++i)
            os << csv::fmt(path.grid[i]) << ',' << csv::fmt(path.values[i]) << ',' << p << '\n';
    }
}

}  // namespace lsx
