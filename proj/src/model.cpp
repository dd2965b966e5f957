#include "lsx/model.hpp"

#include "lsx/error.hpp"
#include "lsx/specfun.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace lsx {

namespace {

bool close(double x, double y, double tol) {
    return std::abs(x - y) <= tol * std::max(1.0, std::abs(y));
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

const char* to_string(Regime r) noexcept {
    switch (r) {
        case Regime::variance_dominated: return "variance_dominated";
        case Regime::balanced: return "balanced";
        case Regime::index_dominated: return "index_dominated";
    }
    return "unknown";
}

Regime classify_regime(double gamma, double beta) {
    if (!(gamma > 0.0) || !(beta > 0.0))
        fail(ErrorKind::invalid_argument, "classify_regime: gamma and beta must be positive");
    if (gamma < beta) return Regime::variance_dominated;
    if (gamma == beta) return Regime::balanced;
    return Regime::index_dominated;
}

RegimeParams RegimeParams::make(double alpha0, double a0, double b, double beta, double gamma,
                                double c, double t0, double T) {
    if (!(alpha0 > 0.0 && alpha0 < 2.0))
        fail(ErrorKind::invalid_argument, "RegimeParams: alpha0 must lie in (0, 2)");
    if (!(a0 > 0.0) || !std::isfinite(a0))
        fail(ErrorKind::invalid_argument, "RegimeParams: a0 must be positive");
    if (!(b >= 0.0) || !std::isfinite(b))
        fail(ErrorKind::invalid_argument, "RegimeParams: b must be >= 0");
    if (!(beta > 0.0) || !(gamma > 0.0) || !(c > 0.0))
        fail(ErrorKind::invalid_argument, "RegimeParams: beta, gamma and c must be positive");
    if (!(T > 0.0) || !std::isfinite(T))
        fail(ErrorKind::invalid_argument, "RegimeParams: T must be positive");
    if (!(t0 >= 0.0 && t0 <= T))
        fail(ErrorKind::invalid_argument, "RegimeParams: t0 must lie in [0, T]");
    RegimeParams p;
    p.alpha0 = alpha0;
    p.a0 = a0;
    p.b = b;
    p.beta = beta;
    p.gamma = gamma;
    p.c = c;
    p.t0 = t0;
    p.T = T;
    p.ihat = (t0 == 0.0 || t0 == T) ? 1 : 2;
    return p;
}

ProcessSpec::ProcessSpec(Interval horizon, IndexProfile index, VarianceProfile variance,
                         LocalScale scale, Kernel correlation,
                         std::optional<Profile> stationary_correlation)
    : horizon_(horizon),
      index_(std::move(index)),
      variance_(std::move(variance)),
      scale_(std::move(scale)),
      correlation_(std::move(correlation)),
      stationary_(std::move(stationary_correlation)) {
    if (!std::isfinite(horizon_.start) || !std::isfinite(horizon_.end) ||
        !(horizon_.end > horizon_.start))
        fail(ErrorKind::invalid_argument, "ProcessSpec: horizon must be a nonempty finite interval");
    if (!index_.alpha || !variance_.sigma || !scale_.a || !correlation_)
        fail(ErrorKind::invalid_argument, "ProcessSpec: all profiles must be callable");
    if (!horizon_.contains(variance_.t0))
        fail(ErrorKind::invalid_argument, "ProcessSpec: t0 = " + num(variance_.t0) +
                                              " outside the horizon");
    const double t0 = variance_.t0;

    // alpha0 == 2 is admissible pointwise but contradicts the index expansion with b > 0.
    if (!(index_.alpha0 > 0.0 && index_.alpha0 < 2.0))
        fail(ErrorKind::invalid_argument, "ProcessSpec: alpha0 must lie in (0, 2)");
    if (!(index_.b >= 0.0) || !(index_.beta > 0.0) || !(index_.delta > 0.0))
        fail(ErrorKind::invalid_argument,
             "ProcessSpec: index expansion needs b >= 0, beta > 0, delta > 0");
    if (!close(index_.alpha(t0), index_.alpha0, 1e-12))
        fail(ErrorKind::invalid_argument, "ProcessSpec: alpha(t0) = " + num(index_.alpha(t0)) +
                                              " disagrees with alpha0 = " + num(index_.alpha0));

    if (!(variance_.c >= 0.0) || !(variance_.gamma > 0.0))
        fail(ErrorKind::invalid_argument, "ProcessSpec: variance needs c >= 0 and gamma > 0");
    if (!close(variance_.sigma(t0), 1.0, 1e-12))
        fail(ErrorKind::invalid_argument,
             "ProcessSpec: sigma(t0) = " + num(variance_.sigma(t0)) + ", expected 1");

    if (!(scale_.a0 > 0.0) || !std::isfinite(scale_.a0))
        fail(ErrorKind::invalid_argument, "ProcessSpec: a0 must be positive");
    if (!close(scale_.a(t0), scale_.a0, 1e-12))
        fail(ErrorKind::invalid_argument, "ProcessSpec: a(t0) = " + num(scale_.a(t0)) +
                                              " disagrees with a0 = " + num(scale_.a0));
}

RegimeParams ProcessSpec::regime_params() const {
    if (variance_.c == 0.0)
        fail(ErrorKind::model, "flat variance profile: no localizing maximum (c == 0)");
    return RegimeParams::make(index_.alpha0, scale_.a0, index_.b, index_.beta, variance_.gamma,
                              variance_.c, variance_.t0 - horizon_.start, horizon_.length());
}

Profile variance_bump(double c, double gamma, double t0) {
    return [c, gamma, t0](double t) {
        return 1.0 / (1.0 + c * std::exp(-std::pow(std::abs(t - t0), -gamma)));
    };
}

Profile index_power(double alpha0, double b, double beta, double t0) {
    return [alpha0, b, beta, t0](double t) {
        return alpha0 + b * std::pow(std::abs(t - t0), beta);
    };
}

ProcessSpec make_powexp_spec(Interval horizon, IndexProfile index, VarianceProfile variance,
                             LocalScale scale) {
    Kernel r = [alpha = index.alpha, a = scale.a](double s, double t) {
        if (s == t) return 1.0;
        const double abar = 0.5 * (a(s) + a(t));
        const double albar = 0.5 * (alpha(s) + alpha(t));
        return std::exp(-abar * std::pow(std::abs(s - t), albar));
    };
    return ProcessSpec(horizon, std::move(index), std::move(variance), std::move(scale),
                       std::move(r));
}

ProcessSpec make_stationary_powexp_spec(Interval horizon, double alpha, double a,
                                        VarianceProfile variance) {
    IndexProfile index{alpha, 0.0, 1.0, 1.0, [alpha](double) { return alpha; }};
    LocalScale scale{a, [a](double) { return a; }};
    Profile rho = [alpha, a](double h) { return std::exp(-a * std::pow(std::abs(h), alpha)); };
    Kernel r = [rho](double s, double t) { return s == t ? 1.0 : rho(s - t); };
    return ProcessSpec(horizon, std::move(index), std::move(variance), std::move(scale),
                       std::move(r), rho);
}

double delta1(double u, double gamma, double q) {
    if (!(gamma > 0.0) || !(q > 1.0))
        fail(ErrorKind::invalid_argument, "delta1: need gamma > 0 and q > 1");
    if (!(u > 0.0) || !std::isfinite(u))
        fail(ErrorKind::window_undefined, "delta1: u must be finite and > e");
    const double lnu = std::log(u);
    const double lnlnu = std::log(lnu);
    if (!(lnlnu > 0.0))
        fail(ErrorKind::window_undefined, "delta1: u = " + num(u) + " is not above e");
    const double denom = 2.0 * lnu - q * lnlnu;
    if (!(denom > 0.0))
        fail(ErrorKind::window_undefined, "delta1: 2 ln u - q ln ln u <= 0");
    return std::pow(1.0 / denom, 1.0 / gamma);
}

double delta2(double u, double alpha0, double beta) {
    if (!(alpha0 > 0.0) || !(beta > 0.0))
        fail(ErrorKind::invalid_argument, "delta2: need alpha0 > 0 and beta > 0");
    if (!(u > 0.0) || !std::isfinite(u))
        fail(ErrorKind::window_undefined, "delta2: u must be finite and > e");
    const double lnu = std::log(u);
    const double lnlnu = std::log(lnu);
    if (!(lnlnu > 0.0))
        fail(ErrorKind::window_undefined, "delta2: u = " + num(u) + " is not above e");
    return std::pow(alpha0 * alpha0 * lnlnu / (beta * lnu), 1.0 / beta);
}

double localization_window(const RegimeParams& p, double u, double q) {
    if (p.gamma <= p.beta) return delta1(u, p.gamma, q);
    return delta2(u, p.alpha0, p.beta);
}

MfbmSpec MfbmSpec::with_power_hurst(double H0, double b, double beta, double delta, double T1,
                                    double T2, double t0, double gamma,
                                    double holder_exponent) {
    MfbmSpec s;
    s.hurst = [H0, b, beta, t0](double t) { return H0 + b * std::pow(std::abs(t - t0), beta); };
    s.holder_exponent = holder_exponent;
    s.T1 = T1;
    s.T2 = T2;
    s.t0 = t0;
    s.gamma = gamma;
    s.b = b;
    s.beta = beta;
    s.delta = delta;
    return s;
}

double mfbm_covariance(const MfbmSpec& spec, double s, double t) {
    if (!(s >= 0.0) || !(t >= 0.0))
        fail(ErrorKind::invalid_argument, "mfbm_covariance: times must be >= 0");
    const double k = spec.hurst(s) + spec.hurst(t);
    const double d = specfun::mfbm_normalizer(k);
    return 0.5 * d * (std::pow(s, k) + std::pow(t, k) - std::pow(std::abs(t - s), k));
}

ProcessSpec mfbm_to_process_spec(const MfbmSpec& spec) {
    if (!spec.hurst) fail(ErrorKind::invalid_argument, "MfbmSpec: Hurst profile missing");
    if (!(spec.T1 > 0.0 && spec.T2 > spec.T1))
        fail(ErrorKind::invalid_argument, "MfbmSpec: need 0 < T1 < T2");
    if (!(spec.t0 > spec.T1 && spec.t0 < spec.T2))
        fail(ErrorKind::invalid_argument, "MfbmSpec: t0 must lie in (T1, T2)");
    if (!(spec.gamma > 0.0) || !(spec.b > 0.0) || !(spec.beta > 0.0) || !(spec.delta > 0.0) ||
        !(spec.holder_exponent > 0.0))
        fail(ErrorKind::invalid_argument,
             "MfbmSpec: gamma, b, beta, delta and the Holder exponent must be positive");
    const double cap = std::min(1.0, spec.holder_exponent);
    for (int i = 0; i <= 200; ++i) {
        const double t = spec.T1 + (spec.T2 - spec.T1) * i / 200.0;
        const double h = spec.hurst(t);
        if (!(h > 0.0 && h < cap))
            fail(ErrorKind::invalid_argument,
                 "MfbmSpec: H(" + num(t) + ") = " + num(h) + " outside (0, min(1, lambda))");
    }

    const double H0 = spec.hurst(spec.t0);
    auto hurst = spec.hurst;
    IndexProfile index{2.0 * H0, 2.0 * spec.b, spec.beta, spec.delta,
                       [hurst](double t) { return 2.0 * hurst(t); }};
    LocalScale scale{0.5 * std::pow(spec.t0, -2.0 * H0),
                     [hurst](double t) { return 0.5 * std::pow(t, -2.0 * hurst(t)); }};
    VarianceProfile variance{1.0, spec.gamma, spec.t0,
                             [g = spec.gamma, t0 = spec.t0](double t) {
                                 return 1.0 - std::exp(-std::pow(std::abs(t - t0), -g));
                             }};
    Kernel r = [spec](double s, double t) {
        if (s == t) return 1.0;
        const double v = mfbm_covariance(spec, s, t);
        return v / std::sqrt(mfbm_covariance(spec, s, s) * mfbm_covariance(spec, t, t));
    };
    return ProcessSpec(Interval{spec.T1, spec.T2}, std::move(index), std::move(variance),
                       std::move(scale), std::move(r));
}

}  // namespace lsx
