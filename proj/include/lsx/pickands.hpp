#pragma once

#include "lsx/parallel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lsx {

/// crude:   sample mean of sup_t exp(sqrt2 B(t) - t^alpha) over the grid.
/// mixture: the same expectation under a uniform mixture of exponential tilts
///          exp(sqrt2 B(tau) - tau^alpha), tau over the grid; each draw
///          contributes N * max_i e^{W_i} / sum_i e^{W_i} <= N, which removes
///          the heavy right tail of the crude estimator at large S.
enum class PickandsMethod { crude, mixture };

const char* to_string(PickandsMethod m) noexcept;

struct PickandsFit {
    double value = 0.0;     // fitted limit H of h_rate(S) = H + C / S
    double slope = 0.0;     // C
    double residual = 0.0;  // weighted chi^2 per degree of freedom
    bool ill_conditioned = false;  // value falls back to the largest-S h_rate
};

struct PickandsLadderPoint {
    double S = 0.0;
    double h_interval = 0.0;
    double h_rate = 0.0;
    double std_error = 0.0;  // of h_interval
};

struct PickandsEstimate {
    double alpha = 1.0;
    double S = 0.0;
    double mesh = 0.0;
    std::size_t n_samples = 0;
    double h_interval = 1.0;
    double h_rate = 0.0;
    double std_error = 0.0;  // of h_interval
    PickandsMethod method = PickandsMethod::mixture;
    std::optional<PickandsFit> extrapolated;
    std::vector<PickandsLadderPoint> ladder;
    std::optional<double> mesh_bias;  // h_rate(mesh / 2) - h_rate(mesh) at the largest S
};

/// max_i exp(sqrt2 path_i - powers_i) over i < limit with the given stride.
double pickands_functional(std::span<const double> path, std::span<const double> powers,
                           std::size_t limit, std::size_t stride = 1);

/// Estimates H_alpha[0, S] from n_samples fBm paths on the grid of spacing `mesh`.
/// S == 0 is the single point t = 0 and returns exactly 1.
PickandsEstimate estimate_interval_constant(double alpha, double S, double mesh,
                                            std::size_t n_samples, std::uint64_t seed,
                                            PickandsMethod method = PickandsMethod::mixture,
                                            Exec exec = Exec::parallel,
                                            std::uint64_t stream = 0);

struct PickandsOptions {
    PickandsMethod method = PickandsMethod::mixture;
    bool mesh_bias = false;
    Exec exec = Exec::parallel;
};

/// Runs estimate_interval_constant over an increasing S ladder (>= 3 horizons)
/// and extrapolates h_rate(S) = H + C/S by weighted least squares.
PickandsEstimate estimate_pickands(double alpha, std::span<const double> S_ladder, double mesh,
                                   std::size_t n_samples, std::uint64_t seed,
                                   const PickandsOptions& opt = {});

}  // namespace lsx
