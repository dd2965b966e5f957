#pragma once

#include "lsx/grid.hpp"
#include "lsx/model.hpp"
#include "lsx/parallel.hpp"
#include "lsx/sampler.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lsx {

enum class TailMethod { crude, importance };

/// single_point: exponential tilt at the sigma-argmax point.
/// mixture:      tilts at every point, mixed with weights proportional to Psi(u / sigma_i).
enum class TiltPolicy { single_point, mixture };

const char* to_string(TailMethod m) noexcept;
const char* to_string(TiltPolicy t) noexcept;

/// Raw output of the exceedance kernels.
struct ExceedanceStats {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    std::size_t hits = 0;       // paths whose maximum exceeded u
    double ess = 0.0;           // (sum w)^2 / sum w^2 over contributing weights
    double mean_weight = 1.0;   // mean likelihood ratio (importance only)
    double mean_weight_se = 0.0;
};

/// Fraction of sampled vectors with max > u, binomial standard error.
ExceedanceStats crude_exceedance(const GaussianSampler& sampler, double u, std::size_t n,
                                 std::uint64_t seed, std::uint64_t stream = 0,
                                 Exec exec = Exec::parallel);

/// Mean-shift importance sampling with exact Gaussian likelihood ratios.
ExceedanceStats importance_exceedance(const GaussianSampler& sampler, double u, std::size_t n,
                                      std::uint64_t seed, std::uint64_t stream = 0,
                                      TiltPolicy tilt = TiltPolicy::mixture,
                                      Exec exec = Exec::parallel);

struct TailEstimate {
    double u = 0.0;
    double p_hat = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    TailMethod method = TailMethod::crude;
    Grid grid{0.0, 0.0, 1};
    double ess = 0.0;
    double mean_weight = 1.0;
    double mean_weight_se = 0.0;
    std::string warning;  // e.g. ill-tilted (ess < 0.01 n) or coarse mesh
};

TailEstimate crude_tail(const ProcessSpec& spec, const Grid& grid, double u, std::size_t n,
                        std::uint64_t seed, Exec exec = Exec::parallel);

TailEstimate importance_tail(const ProcessSpec& spec, const Grid& grid, double u, std::size_t n,
                             std::uint64_t seed, TiltPolicy tilt = TiltPolicy::mixture,
                             Exec exec = Exec::parallel);

// --- theory comparison ----------------------------------------------------------

enum class TheoryKind { automatic, stationary, theorem1 };

struct CompareConfig {
    std::size_t n = 100000;
    std::size_t min_points = 64;
    std::size_t max_points = 4096;
    double mesh_factor = 0.1;  // mesh target = mesh_factor * u^{-2/alpha}
    TheoryKind theory = TheoryKind::automatic;
    TiltPolicy tilt = TiltPolicy::mixture;
    std::uint64_t seed = 1;
    Exec exec = Exec::parallel;
};

struct ComparisonRow {
    double u = 0.0;
    double p_emp = 0.0;
    double se = 0.0;
    double p_theory = 0.0;
    double ratio = 0.0;
    double ratio_lo = 0.0;
    double ratio_hi = 0.0;
    double mesh = 0.0;
    std::size_t n = 0;
    std::string method;
    double ess = 0.0;
    std::string warning;
};

struct ComparisonTable {
    std::string theory;  // "stationary" or "theorem1"
    std::vector<ComparisonRow> rows;
};

ComparisonTable compare_to_theory(const ProcessSpec& spec, std::span<const double> u_ladder,
                                  double H_alpha, const CompareConfig& cfg = {});

/// CSV columns: u,p_emp,se,p_theory,ratio,ratio_lo,ratio_hi,mesh,n,method
void write_comparison_csv(std::ostream& os, const ComparisonTable& table);

/// Two-column plot series u, ratio plus error-band columns. Throws on an empty table.
void emit_plotdata(const ComparisonTable& table, std::ostream& os);

// --- localization -------------------------------------------------------------------

struct LocalizationConfig {
    double mesh = 0.0;         // 0 selects the u^{-2/alpha} guidance
    double bound_constant = 1.0;
    TiltPolicy tilt = TiltPolicy::mixture;
    Exec exec = Exec::parallel;
};

struct LocalizationReport {
    double u = 0.0;
    double q = 2.0;
    Regime regime = Regime::variance_dominated;
    std::string window;  // "delta1" or "delta2"
    double delta = 0.0;
    double inner_start = 0.0;
    double inner_end = 0.0;
    double mesh = 0.0;
    ExceedanceStats inner;
    ExceedanceStats outer;
    bool outer_empty = false;
    bool outer_is_bound = false;  // outer_value is a 95% Clopper-Pearson upper bound
    double outer_value = 0.0;
    double ratio = 0.0;           // outer_value / inner.p_hat
    double bound_shape = 0.0;     // C T u^{2/alpha} (ln u)^{-4/(3 beta)} Psi(u)
    double single_point = 0.0;    // Psi(u), the containment lower bound
};

LocalizationReport localization_check(const ProcessSpec& spec, double u, double q, std::size_t n,
                                      std::uint64_t seed, const LocalizationConfig& cfg = {});

/// One-sided Clopper-Pearson upper bound for k hits in n trials.
double clopper_pearson_upper(std::size_t k, std::size_t n, double confidence = 0.95);

// --- Slepian sandwich -------------------------------------------------------------

struct SandwichConfig {
    double u = 3.0;
    double nu = 0.3;
    double S = 4.0;
    double q = 2.0;
    std::size_t points = 65;
    std::size_t n = 1000000;
    Exec exec = Exec::parallel;
};

struct SandwichReport {
    double u = 0.0;
    double nu = 0.0;
    double S = 0.0;
    double window = 0.0;
    double lower_exponent = 0.0;
    double time_scale = 0.0;  // u^{-2/alpha}
    ExceedanceStats lower;
    ExceedanceStats target;
    ExceedanceStats upper;
    double lower_cov_gap = 0.0;  // max(cov_target - cov_lower); <= 0 means Slepian applies
    double upper_cov_gap = 0.0;  // max(cov_upper - cov_target)
    bool ordered = false;        // lower <= target <= upper within 3 pooled SE
};

/// Compares the standardized process on t0 + [0, S] u^{-2/alpha} with the
/// lower (more correlated) and upper (less correlated) stationary comparison
/// processes on a common grid and threshold.
SandwichReport slepian_sandwich(const ProcessSpec& spec, const SandwichConfig& cfg,
                                std::uint64_t seed);

}  // namespace lsx
