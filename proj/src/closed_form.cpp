// SPDX-License-Identifier: Apache-2.0
#include "linesol/closed_form.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "linesol/quadrature.hpp"
#include "linesol/special_functions.hpp"

namespace linesol {

double omega_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::domain_error("omega_p: exponent p must satisfy p > 1");
  }
  return 4.0 / ((p - 1.0) * (p + 3.0));
}

SolitonParams::SolitonParams(double p_, double omega_) : p(p_), omega(omega_) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw std::domain_error("SolitonParams: exponent p must satisfy p > 1");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::domain_error("SolitonParams: frequency omega must be positive");
  }
}

double SolitonParams::amplitude() const {
  return std::pow(0.5 * omega * (p + 1.0), 1.0 / (p - 1.0));
}

double SolitonParams::kappa() const { return 0.5 * (p - 1.0) * std::sqrt(omega); }

double soliton_power(const SolitonParams& sp, double x, double s) {
  const double m = 2.0 / (sp.p - 1.0);
  const double log_amp = std::log(0.5 * sp.omega * (sp.p + 1.0)) / (sp.p - 1.0);
  const double e = s * (log_amp + m * log_sech(sp.kappa() * x));
  if (e < -700.0) {
    return 0.0;
  }
  return std::exp(e);
}

double soliton_value(const SolitonParams& sp, double x) { return soliton_power(sp, x, 1.0); }

double soliton_value_scaled(const SolitonParams& sp, double x) {
  const SolitonParams unit(sp.p, 1.0);
  return std::pow(sp.omega, 1.0 / (sp.p - 1.0)) *
         soliton_value(unit, std::sqrt(sp.omega) * x);
}

SolitonDerivatives soliton_derivatives(const SolitonParams& sp, double x) {
  const double r = soliton_value(sp, x);
  const double dr = -std::sqrt(sp.omega) * std::tanh(sp.kappa() * x) * r;
  const double dw = r / ((sp.p - 1.0) * sp.omega) + x * dr / (2.0 * sp.omega);
  return {dr, dw};
}

double soliton_second_derivative(const SolitonParams& sp, double x) {
  const double r = soliton_value(sp, x);
  const double t = std::tanh(sp.kappa() * x);
  const double sech2 = 1.0 - t * t;
  return -std::sqrt(sp.omega) * sp.kappa() * sech2 * r + sp.omega * t * t * r;
}

double soliton_power_integral(const SolitonParams& sp, double s) {
  if (!(s > 0.0)) {
    throw std::domain_error("soliton_power_integral: exponent must be positive");
  }
  const double m = 2.0 / (sp.p - 1.0);
  return std::pow(sp.amplitude(), s) * sech_power_integral(m * s) / sp.kappa();
}

double psi_normalization(const SolitonParams& sp) {
  const double n2 = soliton_power_integral(sp, sp.p + 1.0);
  return 1.0 / std::sqrt(std::numbers::pi * n2);
}

double psi_value(const SolitonParams& sp, double x) {
  return psi_normalization(sp) * soliton_power(sp, x, 0.5 * (sp.p + 1.0));
}

double ClosedFormProfile::operator()(double x) const {
  switch (kind) {
    case ProfileKind::R:
      return soliton_value(params, x);
    case ProfileKind::dR_dx:
      return soliton_derivatives(params, x).dR_dx;
    case ProfileKind::dR_domega:
      return soliton_derivatives(params, x).dR_domega;
    case ProfileKind::psi:
      return psi_value(params, x);
    case ProfileKind::R_power:
      return soliton_power(params, x, exponent);
  }
  return 0.0;
}

IdentityResiduals identity_residuals(const SolitonParams& sp, double q, double r) {
  if (!(q >= 1.0)) {
    throw std::domain_error("identity_residuals: q must satisfy q >= 1");
  }
  if (!(r > 1.0)) {
    throw std::domain_error("identity_residuals: r must satisfy r > 1");
  }
  const double p = sp.p;
  const double w = sp.omega;
  const double half_width = 40.0 / std::sqrt(w);

  IdentityResiduals out{};
  out.lhs_q = integrate_even(
      [&](double x) { return soliton_power(sp, x, q) * soliton_derivatives(sp, x).dR_domega; },
      half_width);
  out.rhs_q = (2.0 * q - p + 3.0) / (2.0 * (p - 1.0) * (q + 1.0)) / w *
              soliton_power_integral(sp, q + 1.0);
  out.lhs_r = integrate_even([&](double x) { return soliton_power(sp, x, p + r); }, half_width);
  out.rhs_r = (p + 1.0) * (r + 1.0) / (2.0 * r + p + 1.0) * w *
              soliton_power_integral(sp, r + 1.0);
  // At p = 2q+3 the right side vanishes; fall back to the scale ω^{-1}∫R^{q+1}.
  const double coef_q = (2.0 * q - p + 3.0) / (2.0 * (p - 1.0) * (q + 1.0));
  const double scale_q = std::fabs(coef_q) > 1e-12
                             ? std::fabs(out.rhs_q)
                             : soliton_power_integral(sp, q + 1.0) / w;
  out.res_q = std::fabs(out.lhs_q - out.rhs_q) / scale_q;
  out.res_r = std::fabs(out.lhs_r - out.rhs_r) / std::fabs(out.rhs_r);
  return out;
}

}  // namespace linesol
