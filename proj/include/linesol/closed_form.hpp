// SPDX-License-Identifier: Apache-2.0
//
// Closed-form line soliton R_ω(x) of -R'' + ωR - R^p = 0 and the quantities
// derived from it. Everything here is grid-free; the discretized modules test
// against these values.
#pragma once

namespace linesol {

/// Bifurcation frequency 4/((p-1)(p+3)). Throws std::domain_error for p ≤ 1.
double omega_p(double p);

struct SolitonParams {
  double p;
  double omega;

  /// Throws std::domain_error unless p > 1 and omega > 0.
  SolitonParams(double p_, double omega_);

  double amplitude() const;  // R(0) = (ω(p+1)/2)^{1/(p-1)}
  double kappa() const;      // (p-1)√ω/2, the sech argument scale
};

double soliton_value(const SolitonParams& sp, double x);

/// Same value through R_ω(x) = ω^{1/(p-1)} R_1(√ω x).
double soliton_value_scaled(const SolitonParams& sp, double x);

/// R^s(x) evaluated in log space (no pow of an underflowed value).
double soliton_power(const SolitonParams& sp, double x, double s);

struct SolitonDerivatives {
  double dR_dx;
  double dR_domega;
};

/// dR/dx from the sech profile; ∂_ωR = R/((p-1)ω) + x R'/(2ω).
SolitonDerivatives soliton_derivatives(const SolitonParams& sp, double x);

/// Analytic R''(x).
double soliton_second_derivative(const SolitonParams& sp, double x);

/// ∫_ℝ R^s dx for s > 0, from sech_power_integral.
double soliton_power_integral(const SolitonParams& sp, double s);

/// 1 / (√π ‖R^{(p+1)/2}‖_{L²(ℝ)}).
double psi_normalization(const SolitonParams& sp);

/// ψ_ω(x) = R^{(p+1)/2}(x) · psi_normalization; ψ cos y has unit norm on ℝ×𝕋.
double psi_value(const SolitonParams& sp, double x);

enum class ProfileKind { R, dR_dx, dR_domega, psi, R_power };

struct ClosedFormProfile {
  ProfileKind kind;
  SolitonParams params;
  double exponent = 1.0;  // used by R_power only

  double operator()(double x) const;
};

struct IdentityResiduals {
  double res_q;
  double res_r;
  double lhs_q, rhs_q;
  double lhs_r, rhs_r;
};

/// Relative residuals of
///   ∫R^q ∂_ωR = (2q-p+3)/(2(p-1)(q+1)) ω^{-1} ∫R^{q+1}
///   ∫R^{p+r}  = (p+1)(r+1)/(2r+p+1) ω ∫R^{r+1}
/// Left sides by adaptive quadrature, right sides from the Gamma closed form.
/// Requires q ≥ 1 and r > 1 (std::domain_error otherwise).
IdentityResiduals identity_residuals(const SolitonParams& sp, double q, double r);

}  // namespace linesol
