#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lsx {

using Profile = std::function<double(double)>;
using Kernel = std::function<double(double, double)>;

struct Interval {
    double start = 0.0;
    double end = 1.0;

    double length() const noexcept { return end - start; }
    bool contains(double t) const noexcept { return t >= start && t <= end; }
};

/// alpha(t) near its expansion point: alpha(t0 + t) = alpha0 + b|t|^beta + o(|t|^{beta+delta}).
/// b == 0 marks an index that is constant near t0.
struct IndexProfile {
    double alpha0 = 1.0;
    double b = 0.0;
    double beta = 1.0;
    double delta = 1.0;
    Profile alpha;
};

/// sigma(t) with unique maximum 1 at t0 and 1/sigma(t) = 1 + c exp(-|t-t0|^-gamma)(1+o(1)).
/// c == 0 marks a flat variance (no localizing maximum).
struct VarianceProfile {
    double c = 1.0;
    double gamma = 1.0;
    double t0 = 0.0;
    Profile sigma;
};

struct LocalScale {
    double a0 = 1.0;
    Profile a;
};

enum class Regime { variance_dominated, balanced, index_dominated };

const char* to_string(Regime r) noexcept;

/// Exact trichotomy on gamma - beta (no tolerance).
Regime classify_regime(double gamma, double beta);

/// Scalar inputs of the three-regime tail formula.
struct RegimeParams {
    double alpha0 = 1.0;
    double a0 = 1.0;
    double b = 0.0;
    double beta = 1.0;
    double gamma = 1.0;
    double c = 1.0;
    double t0 = 0.0;  // measured from the start of the horizon
    double T = 1.0;
    int ihat = 1;

    /// Validates the tuple and derives ihat from t0's position in [0, T].
    static RegimeParams make(double alpha0, double a0, double b, double beta, double gamma,
                             double c, double t0, double T);

    Regime regime() const { return classify_regime(gamma, beta); }
};

class ProcessSpec {
public:
    ProcessSpec(Interval horizon, IndexProfile index, VarianceProfile variance, LocalScale scale,
                Kernel correlation, std::optional<Profile> stationary_correlation = std::nullopt);

    const Interval& horizon() const noexcept { return horizon_; }
    const IndexProfile& index() const noexcept { return index_; }
    const VarianceProfile& variance() const noexcept { return variance_; }
    const LocalScale& scale() const noexcept { return scale_; }

    double t0() const noexcept { return variance_.t0; }
    double sigma(double t) const { return variance_.sigma(t); }
    double alpha(double t) const { return index_.alpha(t); }
    double a(double t) const { return scale_.a(t); }
    double correlation(double s, double t) const { return correlation_(s, t); }
    double covariance(double s, double t) const { return sigma(s) * sigma(t) * correlation_(s, t); }

    /// Present when r(s,t) = rho(|s-t|); enables the circulant fast path.
    const std::optional<Profile>& stationary_correlation() const noexcept { return stationary_; }

    RegimeParams regime_params() const;

private:
    Interval horizon_;
    IndexProfile index_;
    VarianceProfile variance_;
    LocalScale scale_;
    Kernel correlation_;
    std::optional<Profile> stationary_;
};

/// The named variance profile 1 / (1 + c exp(-|t-t0|^-gamma)).
Profile variance_bump(double c, double gamma, double t0);

/// alpha0 + b |t - t0|^beta.
Profile index_power(double alpha0, double b, double beta, double t0);

/// Synthetic locally stationary family
///   r(s,t) = exp(-abar |s-t|^alphabar),  abar, alphabar the midpoint averages of a and alpha.
/// Stationary (and exactly positive definite) when a and alpha are constant.
ProcessSpec make_powexp_spec(Interval horizon, IndexProfile index, VarianceProfile variance,
                             LocalScale scale);

/// r(s,t) = exp(-a |s-t|^alpha) with constant a and alpha; flagged stationary.
ProcessSpec make_stationary_powexp_spec(Interval horizon, double alpha, double a,
                                        VarianceProfile variance);

// --- localization windows ---------------------------------------------------

/// (1 / (2 ln u - q ln ln u))^{1/gamma}; requires u > e.
double delta1(double u, double gamma, double q = 2.0);

/// (alpha^2 ln ln u / (beta ln u))^{1/beta}; requires u > e.
double delta2(double u, double alpha0, double beta);

/// delta1 when gamma <= beta, delta2 otherwise.
double localization_window(const RegimeParams& p, double u, double q = 2.0);

// --- multifractional Brownian motion ----------------------------------------

struct MfbmSpec {
    Profile hurst;
    double holder_exponent = 1.0;
    double T1 = 0.5;
    double T2 = 1.5;
    double t0 = 1.0;
    double gamma = 1.0;
    double b = 0.1;
    double beta = 1.0;
    double delta = 1.0;

    /// H(t) = H0 + b|t - t0|^beta on [T1, T2].
    static MfbmSpec with_power_hurst(double H0, double b, double beta, double delta, double T1,
                                     double T2, double t0, double gamma,
                                     double holder_exponent = 1.0);
};

double mfbm_covariance(const MfbmSpec& spec, double s, double t);

/// Standardized mfBm times sigma(t) = 1 - exp(-|t-t0|^-gamma) on [T1, T2].
ProcessSpec mfbm_to_process_spec(const MfbmSpec& spec);

// --- assumption validation ---------------------------------------------------

struct ValidationConfig {
    std::vector<double> h_ladder{1e-2, 1e-3, 1e-4};
    double correlation_tol = 0.05;  // at the smallest h
    double variance_tol = 0.05;
    double index_tol = 0.05;
    std::size_t probe_points = 9;
    std::size_t uniqueness_points = 2001;
};

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    double worst_residual = 0.0;
    double tolerance = 0.0;
    std::vector<double> residual_trend;  // one entry per probe scale, coarse to fine
    std::string detail;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;

    bool all_passed() const;
    const AssumptionCheck* find(const std::string& name) const;
};

ValidationReport validate_assumptions(const ProcessSpec& spec, const ValidationConfig& cfg = {});

}  // namespace lsx
