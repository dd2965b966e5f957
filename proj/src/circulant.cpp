#include "lsx/circulant.hpp"

#include "lsx/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

namespace lsx {

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct CirculantEmbedding::Plan {
    fftw_plan plan = nullptr;

    explicit Plan(std::size_t m) {
        std::lock_guard lock(planner_mutex());
        auto* tmp = fftw_alloc_complex(m);
        // FFTW_ESTIMATE keeps the algorithm choice, and so every bit of output, reproducible.
        plan = fftw_plan_dft_1d(static_cast<int>(m), tmp, tmp, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_free(tmp);
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
};

void CirculantEmbedding::Workspace::Free::operator()(std::complex<double>* p) const noexcept {
    fftw_free(p);
}

CirculantEmbedding::Workspace::Workspace(std::size_t m)
    : buf_(reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(m))) {}

CirculantEmbedding::CirculantEmbedding(std::span<const double> autocov) {
    if (autocov.size() < 2)
        fail(ErrorKind::invalid_argument, "circulant embedding needs at least two lags");
    n_ = autocov.size() - 1;
    const std::size_t m = 2 * n_;
    plan_ = std::make_shared<Plan>(m);

    Workspace ws(m);
    auto* c = ws.data();
    for (std::size_t k = 0; k <= n_; ++k) c[k] = autocov[k];
    for (std::size_t k = n_ + 1; k < m; ++k) c[k] = autocov[m - k];
    fftw_execute_dft(plan_->plan, reinterpret_cast<fftw_complex*>(c),
                     reinterpret_cast<fftw_complex*>(c));

    eig_.resize(m);
    for (std::size_t k = 0; k < m; ++k) eig_[k] = c[k].real();
    const double top = *std::max_element(eig_.begin(), eig_.end());
    const auto low = std::min_element(eig_.begin(), eig_.end());
    if (!(top > 0.0) || *low < -1e-9 * top) {
        std::ostringstream os;
        os << "circulant embedding has negative eigenvalue " << *low << " at index "
           << (low - eig_.begin()) << " (max " << top << ")";
        fail(ErrorKind::embedding_failure, os.str());
    }
    lambda_.resize(m);
    for (std::size_t k = 0; k < m; ++k)
        lambda_[k] = std::sqrt(std::max(eig_[k], 0.0) / double(m));
}

void CirculantEmbedding::draw_pair(Rng& rng, Workspace& ws, std::span<double> a,
                                   std::span<double> b) const {
    const std::size_t m = 2 * n_;
    std::normal_distribution<double> z;
    auto* w = ws.data();
    for (std::size_t k = 0; k < m; ++k) {
        const double re = z(rng);
        const double im = z(rng);
        w[k] = {lambda_[k] * re, lambda_[k] * im};
    }
    fftw_execute_dft(plan_->plan, reinterpret_cast<fftw_complex*>(w),
                     reinterpret_cast<fftw_complex*>(w));
    const std::size_t na = std::min(a.size(), n_);
    const std::size_t nb = std::min(b.size(), n_);
    for (std::size_t j = 0; j < na; ++j) a[j] = w[j].real();
    for (std::size_t j = 0; j < nb; ++j) b[j] = w[j].imag();
}

}  // namespace lsx
