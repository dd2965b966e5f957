#pragma once

#include <limits>

namespace lsx::specfun {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Above this threshold the normal tail is below the smallest normal double.
inline constexpr double kSurvivalUnderflow = 38.0;

struct SurvivalValue {
    double value = 0.0;
    bool underflow = false;  // true when u > kSurvivalUnderflow
};

/// P(Z > u) for standard normal Z, evaluated through erfc so the relative
/// accuracy holds deep in the upper tail.
double survival(double u);

/// Same as survival() but flags the subnormal/zero range explicitly.
SurvivalValue survival_checked(double u);

/// log P(Z > u); finite for every finite u (asymptotic series past the erfc range).
double log_survival(double u);

/// Lower regularized incomplete gamma P(a, x) = gamma_lower(a, x) / Gamma(a).
/// Series for x < a + 1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

/// Unregularized lower incomplete gamma.
double gamma_lower(double a, double x);

/// Integral of exp(-(2b/alpha^2) x^beta) over [0, L]; L may be +infinity.
double regime_integral(double b, double beta, double alpha, double L);

/// 2 pi / (Gamma(x+1) sin(pi x / 2)) for x in (0, 2).
double mfbm_normalizer(double x);

}  // namespace lsx::specfun
