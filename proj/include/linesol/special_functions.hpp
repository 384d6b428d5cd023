// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace linesol {

/// Natural log of Γ(x) for x > 0 (Lanczos, g = 7, nine terms; relative
/// error below 1e-14 on the positive axis).
double log_gamma(double x);

/// Γ(x) for x > 0.
double gamma_fn(double x);

/// log(sech t), stable for large |t|.
double log_sech(double t);

/// sech(t)^s for real s, computed in log space. Returns exactly 0 once the
/// log falls below -700.
double sech_pow(double t, double s);

/// ∫_ℝ sech^s(t) dt = √π Γ(s/2) / Γ((s+1)/2). Throws std::domain_error for s ≤ 0.
double sech_power_integral(double s);

}  // namespace linesol
