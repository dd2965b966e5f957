#pragma once

#include "lsx/circulant.hpp"
#include "lsx/grid.hpp"
#include "lsx/model.hpp"
#include "lsx/parallel.hpp"
#include "lsx/rng.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace lsx {

/// Symmetric covariance with its Cholesky factor. A diagonal jitter from the
/// ladder {1e-14, 1e-12, 1e-10} * trace/n is added only when the plain
/// factorization fails, and is recorded.
class CovarianceMatrix {
public:
    static CovarianceMatrix factorize(std::vector<double> times, Eigen::MatrixXd m,
                                      std::optional<Grid> grid = std::nullopt);

    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::optional<Grid>& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }
    const Eigen::MatrixXd& factor() const noexcept { return l_; }
    double jitter() const noexcept { return jitter_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    std::vector<double> times_;
    std::optional<Grid> grid_;
    Eigen::MatrixXd m_;
    Eigen::MatrixXd l_;
    double jitter_ = 0.0;
};

/// Source of centered Gaussian vectors with a known covariance.
class GaussianSampler {
public:
    virtual ~GaussianSampler() = default;

    virtual std::size_t dim() const = 0;
    virtual double covariance(std::size_t i, std::size_t j) const = 0;

    /// Writes `count` independent vectors row-major into out (count * dim values).
    virtual void sample(Rng& rng, std::size_t count, std::span<double> out) const = 0;
};

class DenseSampler final : public GaussianSampler {
public:
    explicit DenseSampler(CovarianceMatrix cov) : cov_(std::move(cov)) {}

    std::size_t dim() const override { return cov_.size(); }
    double covariance(std::size_t i, std::size_t j) const override { return cov_(i, j); }
    void sample(Rng& rng, std::size_t count, std::span<double> out) const override;

    const CovarianceMatrix& cov() const noexcept { return cov_; }

private:
    CovarianceMatrix cov_;
};

/// sigma(t_i) * Y(t_i) with Y stationary with correlation rho on a uniform grid.
class StationarySampler final : public GaussianSampler {
public:
    StationarySampler(const Grid& grid, const Profile& rho, std::vector<double> sigma);

    std::size_t dim() const override { return sigma_.size(); }
    double covariance(std::size_t i, std::size_t j) const override {
        return sigma_[i] * sigma_[j] * acf_[i > j ? i - j : j - i];
    }
    void sample(Rng& rng, std::size_t count, std::span<double> out) const override;

private:
    std::vector<double> sigma_;
    std::vector<double> acf_;
    CirculantEmbedding embed_;
};

/// Fractional Brownian motion B_alpha on a uniform grid starting at 0, with
/// E B(t)^2 = t^alpha, built from circulant-embedded fractional Gaussian noise.
class FbmSampler final : public GaussianSampler {
public:
    FbmSampler(double alpha, const Grid& grid);

    std::size_t dim() const override { return n_; }
    double covariance(std::size_t i, std::size_t j) const override;
    void sample(Rng& rng, std::size_t count, std::span<double> out) const override;

    double alpha() const noexcept { return alpha_; }
    /// (k * mesh)^alpha for k = 0..n-1.
    const std::vector<double>& powers() const noexcept { return pow_; }

private:
    double alpha_;
    double mesh_;
    std::size_t n_;
    std::vector<double> pow_;
    std::optional<CirculantEmbedding> embed_;
};

/// fGn autocovariance 0.5(|k+1|^alpha - 2|k|^alpha + |k-1|^alpha), k = 0..n.
std::vector<double> fgn_autocovariance(double alpha, std::size_t n);

/// One exact fBm path on `grid` (grid.start() == 0, at least two points).
GridPath fbm_path(double alpha, const Grid& grid, std::uint64_t seed);

/// sigma(s) sigma(t) r(s,t) on the grid, factorized.
CovarianceMatrix covariance_on_grid(const ProcessSpec& spec, const Grid& grid);

/// Same on an arbitrary ordered set of times inside the horizon.
CovarianceMatrix covariance_on_points(const ProcessSpec& spec, std::vector<double> times);

/// `count` independent paths; path p comes from batch p / kDefaultBatch.
std::vector<GridPath> sample_paths(const CovarianceMatrix& cov, std::size_t count,
                                   std::uint64_t seed, Exec exec = Exec::parallel);

/// Picks the circulant path for stationary specs on uniform grids, dense otherwise.
std::unique_ptr<GaussianSampler> make_sampler(const ProcessSpec& spec, const Grid& grid);
std::unique_ptr<GaussianSampler> make_sampler(const ProcessSpec& spec, std::vector<double> times);

enum class ComparisonKind { lower, upper };

/// Stationary comparison kernels on [0, S]:
///   lower: 1 - (1 - nu) a u^{-2} |s-t|^{alpha + 2 b window^beta}
///   upper: 1 - (1 + nu) a u^{-2} |s-t|^{alpha}
CovarianceMatrix comparison_process_cov(ComparisonKind kind, double nu, double u,
                                        const RegimeParams& p, double S, double window,
                                        const Grid& grid);

/// Columnar export with header "t,value,path_id".
void write_paths_csv(std::ostream& os, std::span<const GridPath> paths);

}  // namespace lsx
