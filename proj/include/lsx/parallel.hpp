#pragma once

// Batch driver shared by every Monte Carlo kernel. Work is cut into fixed-size
// batches, batch b draws from substream (root, stream, b), and partial results
// are reduced in batch order, so output never depends on the thread count.
// The serial policy is the reference implementation the parallel one is
// tested against.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lsx {

enum class Exec { serial, parallel };

inline constexpr std::size_t kDefaultBatch = 512;

struct BatchPlan {
    std::size_t total = 0;
    std::size_t batch = kDefaultBatch;

    std::size_t count() const { return batch == 0 ? 0 : (total + batch - 1) / batch; }
    std::size_t begin(std::size_t b) const { return b * batch; }
    std::size_t size(std::size_t b) const { return std::min(batch, total - b * batch); }
};

/// Runs fn(b, begin, size) for every batch and returns the per-batch results in order.
template <class Partial, class Fn>
std::vector<Partial> map_batches(const BatchPlan& plan, Exec exec, Fn&& fn) {
    const std::size_t n = plan.count();
    std::vector<Partial> out(n);
    if (exec == Exec::serial) {
        for (std::size_t b = 0; b < n; ++b) out[b] = fn(b, plan.begin(b), plan.size(b));
        return out;
    }
    std::exception_ptr err;
    std::mutex m;
    const long long nb = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long b = 0; b < nb; ++b) {
        try {
            const auto ub = static_cast<std::size_t>(b);
            out[ub] = fn(ub, plan.begin(ub), plan.size(ub));
        } catch (...) {
            std::lock_guard lock(m);
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace lsx
