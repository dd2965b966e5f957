#pragma once

#include "lsx/rng.hpp"

#include <cstddef>
#include <vector>

namespace lsx {

/// Uniform grid start = t_0 < ... < t_{n-1} = end.
class Grid {
public:
    Grid(double start, double end, std::size_t n);

    /// Grid with spacing `mesh`; mesh must divide (end - start) up to 1e-9 relative.
    static Grid with_mesh(double start, double end, double mesh);

    double start() const noexcept { return start_; }
    double end() const noexcept { return end_; }
    std::size_t size() const noexcept { return n_; }
    double mesh() const noexcept { return n_ < 2 ? 0.0 : (end_ - start_) / double(n_ - 1); }
    double operator[](std::size_t i) const noexcept {
        return i + 1 == n_ ? end_ : start_ + double(i) * mesh();
    }
    std::vector<double> points() const;

private:
    double start_;
    double end_;
    std::size_t n_;
};

struct GridPath {
    Grid grid;
    std::vector<double> values;
    SeedLineage lineage;
};

/// Maximum of the sampled values.
double path_supremum(const GridPath& path);

/// Finest mesh the harness expects at threshold u: 0.1 u^{-2/alpha}.
double recommended_mesh(double u, double alpha);

}  // namespace lsx
