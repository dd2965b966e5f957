#pragma once

#include "lsx/model.hpp"

namespace lsx {

/// Factorized tail approximation; value is the product of the five components.
struct TailApprox {
    double value = 0.0;
    double prefactor = 0.0;   // Ihat a^{1/alpha} H_alpha  (T H_alpha a^{1/alpha} when stationary)
    double power = 0.0;       // u^{2/alpha}
    double log_factor = 1.0;  // (ln u)^{-1/min(gamma, beta)}
    double survival = 0.0;    // Psi(u)
    double constant = 1.0;    // regime constant
    bool survival_underflow = false;
};

/// Pickands' stationary asymptotic T H_alpha a^{1/alpha} u^{2/alpha} Psi(u).
TailApprox stationary_tail(double T, double a, double alpha, double H_alpha, double u);

/// Regime bracket: 2^{-1/gamma}, the truncated integral, or the full integral.
/// A locally constant index (b == 0) takes the variance-dominated constant.
double regime_constant(const RegimeParams& p);

/// Three-regime tail formula for the locally stationary class; requires u > e.
TailApprox theorem1_tail(const RegimeParams& p, double H_alpha, double u);

/// The mfBm closed form written out directly in terms of H = H(t0):
///   2^{1-1/(2H)} (H_{2H} / t0) u^{1/H} (ln u)^{-1/min(gamma,beta)} Psi(u) C,
/// with C built from the exponent b x^beta / H^2. Used as a cross-check.
double mfbm_example_tail(double H, double t0, double b, double beta, double gamma,
                         double H_2H, double u);

}  // namespace lsx
