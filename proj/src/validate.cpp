#include "lsx/error.hpp"
#include "lsx/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lsx {

namespace {

double checked(double v, const char* what, double t) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite " << what << " at t = " << t;
        fail(ErrorKind::model, os.str());
    }
    return v;
}

std::vector<double> uniform_points(const Interval& iv, std::size_t n) {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = n == 1 ? iv.start : iv.start + iv.length() * double(i) / double(n - 1);
    return pts;
}

AssumptionCheck check_index_range(const ProcessSpec& spec, const std::vector<double>& pts) {
    AssumptionCheck c{"i_index_range", true, 0.0, 0.0, {}, ""};
    for (double t : pts) {
        const double a = checked(spec.alpha(t), "alpha(t)", t);
        const double excess = a <= 0.0 ? -a : std::max(0.0, a - 2.0);
        if (a <= 0.0 || a > 2.0) c.passed = false;
        c.worst_residual = std::max(c.worst_residual, excess);
    }
    if (!c.passed) c.detail = "alpha(t) leaves (0, 2]";
    return c;
}

AssumptionCheck check_scale_bounds(const ProcessSpec& spec, const std::vector<double>& pts) {
    AssumptionCheck c{"ii_scale_bounds", true, 0.0, 0.0, {}, ""};
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double t : pts) {
        const double a = checked(spec.a(t), "a(t)", t);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    c.passed = lo > 0.0 && std::isfinite(hi);
    std::ostringstream os;
    os << "inf a = " << lo << ", sup a = " << hi;
    c.detail = os.str();
    return c;
}

AssumptionCheck check_correlation(const ProcessSpec& spec, const ValidationConfig& cfg) {
    AssumptionCheck c{"iii_correlation", false, 0.0, cfg.correlation_tol, {}, ""};
    const auto& iv = spec.horizon();
    std::vector<double> probes(cfg.probe_points);
    for (std::size_t k = 0; k < probes.size(); ++k)
        probes[k] = iv.start + iv.length() * (double(k) + 0.5) / double(probes.size());

    for (double t : probes) {
        const double rtt = checked(spec.correlation(t, t), "r(t,t)", t);
        if (std::abs(rtt - 1.0) > 1e-12) {
            c.detail = "r(t,t) != 1";
            c.worst_residual = std::abs(rtt - 1.0);
            return c;
        }
    }
    for (double h : cfg.h_ladder) {
        double worst = 0.0;
        for (double t : probes) {
            const double s = t + h <= iv.end ? t + h : t - h;
            const double r = checked(spec.correlation(t, s), "r(s,t)", t);
            const double rr = checked(spec.correlation(s, t), "r(s,t)", s);
            if (std::abs(r) > 1.0 + 1e-12 || std::abs(r - rr) > 1e-12) {
                c.detail = "kernel is not a symmetric correlation";
                c.worst_residual = std::numeric_limits<double>::infinity();
                return c;
            }
            const double model = spec.a(t) * std::pow(h, spec.alpha(t));
            worst = std::max(worst, std::abs((1.0 - r) / model - 1.0));
        }
        c.residual_trend.push_back(worst);
    }
    c.worst_residual = c.residual_trend.empty() ? 0.0 : c.residual_trend.back();
    c.passed = c.worst_residual <= c.tolerance;
    return c;
}

AssumptionCheck check_variance_maximum(const ProcessSpec& spec, const std::vector<double>& pts) {
    AssumptionCheck c{"iv_variance_max", false, 0.0, 0.0, {}, ""};
    const auto& v = spec.variance();
    if (v.c == 0.0) {
        c.detail = "flat variance profile (c == 0)";
        return c;
    }
    // Within this radius 1 - sigma ~ c exp(-d^-gamma) < 1e-11, too close to 1
    // for the 1e-12 plateau test below to tell a second maximum from the peak.
    const double flat = v.c > 1e-11 ? std::pow(1.0 / std::log(v.c / 1e-11), 1.0 / v.gamma)
                                    : std::numeric_limits<double>::infinity();
    const double peak = checked(spec.sigma(v.t0), "sigma(t0)", v.t0);
    double excess = std::abs(peak - 1.0);
    double worst_t = v.t0;
    for (double t : pts) {
        const double s = checked(spec.sigma(t), "sigma(t)", t);
        if (s > 1.0 + 1e-12) {
            excess = std::max(excess, s - 1.0);
            worst_t = t;
        } else if (std::abs(t - v.t0) > flat && s >= 1.0 - 1e-12) {
            excess = std::max(excess, s - (1.0 - 1e-12));
            worst_t = t;
            c.detail = "second maximum";
        }
    }
    c.worst_residual = excess;
    c.passed = excess <= 1e-12 && c.detail.empty();
    if (!c.passed) {
        std::ostringstream os;
        os << (c.detail.empty() ? "sigma exceeds 1" : c.detail) << " at t = " << worst_t;
        c.detail = os.str();
    }
    return c;
}

AssumptionCheck check_variance_expansion(const ProcessSpec& spec, const ValidationConfig& cfg) {
    AssumptionCheck c{"iv_variance_expansion", false, 0.0, cfg.variance_tol, {}, ""};
    const auto& v = spec.variance();
    const auto& iv = spec.horizon();
    if (v.c == 0.0) {
        c.detail = "flat variance profile (c == 0)";
        return c;
    }
    for (double eps : {1e-2, 1e-4, 1e-8}) {
        if (v.c <= eps) continue;
        const double d = std::pow(std::log(v.c / eps), -1.0 / v.gamma);
        double worst = -1.0;
        for (double t : {v.t0 - d, v.t0 + d}) {
            if (!iv.contains(t)) continue;
            const double s = checked(spec.sigma(t), "sigma(t)", t);
            worst = std::max(worst, std::abs((1.0 / s - 1.0) / eps - 1.0));
        }
        if (worst >= 0.0) c.residual_trend.push_back(worst);
    }
    if (c.residual_trend.empty()) {
        c.detail = "no probe distance fits inside the horizon";
        return c;
    }
    c.worst_residual = c.residual_trend.back();
    c.passed = c.worst_residual <= c.tolerance;
    return c;
}

AssumptionCheck check_index_expansion(const ProcessSpec& spec, const ValidationConfig& cfg) {
    AssumptionCheck c{"v_index_expansion", false, 0.0, cfg.index_tol, {}, ""};
    const auto& ix = spec.index();
    const auto& iv = spec.horizon();
    const double t0 = spec.t0();
    for (double d : cfg.h_ladder) {
        double worst = -1.0;
        for (double t : {t0 - d, t0 + d}) {
            if (!iv.contains(t)) continue;
            const double da = checked(spec.alpha(t), "alpha(t)", t) - ix.alpha0;
            const double r = ix.b == 0.0 ? std::abs(da) : std::abs(da / (ix.b * std::pow(d, ix.beta)) - 1.0);
            worst = std::max(worst, r);
        }
        if (worst >= 0.0) c.residual_trend.push_back(worst);
    }
    if (c.residual_trend.empty()) {
        c.detail = "no probe distance fits inside the horizon";
        return c;
    }
    if (ix.b == 0.0) c.detail = "locally constant index (b == 0)";
    c.worst_residual = c.residual_trend.back();
    c.passed = c.worst_residual <= c.tolerance;
    return c;
}

}  // namespace

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate_assumptions(const ProcessSpec& spec, const ValidationConfig& cfg) {
    if (cfg.h_ladder.empty() || cfg.probe_points == 0 || cfg.uniqueness_points < 2)
        fail(ErrorKind::invalid_argument, "validate_assumptions: empty probe configuration");
    const auto pts = uniform_points(spec.horizon(), cfg.uniqueness_points);
    ValidationReport rep;
    rep.checks.push_back(check_index_range(spec, pts));
    rep.checks.push_back(check_scale_bounds(spec, pts));
    rep.checks.push_back(check_correlation(spec, cfg));
    rep.checks.push_back(check_variance_maximum(spec, pts));
    rep.checks.push_back(check_variance_expansion(spec, cfg));
    rep.checks.push_back(check_index_expansion(spec, cfg));
    return rep;
}

}  // namespace lsx
