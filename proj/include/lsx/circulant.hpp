#pragma once

#include "lsx/rng.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace lsx {

/// Exact simulation of a stationary Gaussian sequence x_0..x_{n-1} with
/// autocovariance gamma(k), via the even circulant extension of length 2n.
/// Each FFT yields two independent sequences (real and imaginary parts).
class CirculantEmbedding {
public:
    /// `autocov` holds gamma(0..n). Throws embedding_failure if an eigenvalue
    /// is below -1e-9 * max eigenvalue; smaller negatives are clipped to 0.
    explicit CirculantEmbedding(std::span<const double> autocov);

    std::size_t length() const noexcept { return n_; }
    std::size_t embedding_size() const noexcept { return 2 * n_; }
    /// Eigenvalues of the embedded circulant, before clipping.
    const std::vector<double>& eigenvalues() const noexcept { return eig_; }

    class Workspace {
    public:
        explicit Workspace(std::size_t m);
        std::complex<double>* data() noexcept { return buf_.get(); }

    private:
        struct Free {
            void operator()(std::complex<double>* p) const noexcept;
        };
        std::unique_ptr<std::complex<double>[], Free> buf_;
    };

    Workspace make_workspace() const { return Workspace(embedding_size()); }

    /// Fills a and b (each of size length()) with two independent draws.
    void draw_pair(Rng& rng, Workspace& ws, std::span<double> a, std::span<double> b) const;

private:
    struct Plan;
    std::size_t n_;
    std::vector<double> eig_;
    std::vector<double> lambda_;  // sqrt(max(eig, 0) / m)
    std::shared_ptr<Plan> plan_;
};

}  // namespace lsx
