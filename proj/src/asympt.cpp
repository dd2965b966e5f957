#include "lsx/asympt.hpp"

#include "lsx/error.hpp"
#include "lsx/specfun.hpp"

#include <algorithm>
#include <cmath>

namespace lsx {

TailApprox stationary_tail(double T, double a, double alpha, double H_alpha, double u) {
    if (!(T > 0.0) || !(a > 0.0) || !(H_alpha > 0.0))
        fail(ErrorKind::invalid_argument, "stationary_tail: T, a and H_alpha must be positive");
    if (!(alpha > 0.0 && alpha <= 2.0))
        fail(ErrorKind::invalid_argument, "stationary_tail: alpha must lie in (0, 2]");
    if (!(u > 0.0) || !std::isfinite(u))
        fail(ErrorKind::invalid_argument, "stationary_tail: u must be positive");
    TailApprox t;
    t.prefactor = T * H_alpha * std::pow(a, 1.0 / alpha);
    t.power = std::pow(u, 2.0 / alpha);
    t.log_factor = 1.0;
    const auto s = specfun::survival_checked(u);
    t.survival = s.value;
    t.survival_underflow = s.underflow;
    t.constant = 1.0;
    t.value = t.prefactor * t.power * t.log_factor * t.survival * t.constant;
    return t;
}

double regime_constant(const RegimeParams& p) {
    const double edge = std::pow(2.0, -1.0 / p.gamma);
    if (p.b == 0.0) return edge;
    switch (p.regime()) {
        case Regime::variance_dominated: return edge;
        case Regime::balanced: return specfun::regime_integral(p.b, p.beta, p.alpha0, edge);
        case Regime::index_dominated:
            return specfun::regime_integral(p.b, p.beta, p.alpha0, specfun::kInf);
    }
    return edge;
}

TailApprox theorem1_tail(const RegimeParams& p, double H_alpha, double u) {
    if (!(H_alpha > 0.0)) fail(ErrorKind::invalid_argument, "theorem1_tail: H_alpha must be positive");
    if (!(u > 0.0) || !std::isfinite(u) || !(std::log(std::log(u)) > 0.0))
        fail(ErrorKind::asymptotic_domain, "theorem1_tail: requires u > e");
    TailApprox t;
    t.prefactor = p.ihat * std::pow(p.a0, 1.0 / p.alpha0) * H_alpha;
    t.power = std::pow(u, 2.0 / p.alpha0);
    const double m = p.b == 0.0 ? p.gamma : std::min(p.gamma, p.beta);
    t.log_factor = std::pow(std::log(u), -1.0 / m);
    const auto s = specfun::survival_checked(u);
    t.survival = s.value;
    t.survival_underflow = s.underflow;
    t.constant = regime_constant(p);
    t.value = t.prefactor * t.power * t.log_factor * t.survival * t.constant;
    return t;
}

double mfbm_example_tail(double H, double t0, double b, double beta, double gamma, double H_2H,
                         double u) {
    const double pre = std::pow(2.0, 1.0 - 1.0 / (2.0 * H)) * H_2H / t0;
    const double m = std::min(gamma, beta);
    double C = 0.0;
    // exp(-b x^beta / H^2) integrated; written with its own incomplete-gamma substitution
    const double k = b / (H * H);
    const double s = 1.0 / beta;
    if (gamma < beta) {
        C = std::pow(2.0, -1.0 / gamma);
    } else if (gamma == beta) {
        const double L = std::pow(2.0, -1.0 / gamma);
        C = std::tgamma(s) / beta * std::pow(k, -s) * specfun::gamma_p(s, k * std::pow(L, beta));
    } else {
        C = std::tgamma(s) / beta * std::pow(k, -s);
    }
    return pre * std::pow(u, 1.0 / H) * std::pow(std::log(u), -1.0 / m) * specfun::survival(u) * C;
}

}  // namespace lsx
