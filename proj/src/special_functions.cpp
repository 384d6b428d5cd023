// SPDX-License-Identifier: Apache-2.0
#include "linesol/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace linesol {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeffs = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Γ(x) for x ≥ 0.5 via the Lanczos series.
double lanczos_log_gamma(double x) {
  const double z = x - 1.0;
  double sum = kLanczosCoeffs[0];
  for (std::size_t i = 1; i < kLanczosCoeffs.size(); ++i) {
    sum += kLanczosCoeffs[i] / (z + static_cast<double>(i));
  }
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(sum);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw std::domain_error("log_gamma: argument must be positive");
  }
  if (x < 0.5) {
    // Γ(x)Γ(1-x) = π / sin(πx)
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) -
           lanczos_log_gamma(1.0 - x);
  }
  return lanczos_log_gamma(x);
}

double gamma_fn(double x) { return std::exp(log_gamma(x)); }

double log_sech(double t) {
  const double a = std::fabs(t);
  return std::log(2.0) - a - std::log1p(std::exp(-2.0 * a));
}

double sech_pow(double t, double s) {
  const double e = s * log_sech(t);
  if (e < -700.0) {
    return 0.0;
  }
  return std::exp(e);
}

double sech_power_integral(double s) {
  if (!(s > 0.0)) {
    throw std::domain_error("sech_power_integral: exponent must be positive");
  }
  return std::sqrt(std::numbers::pi) *
         std::exp(log_gamma(0.5 * s) - log_gamma(0.5 * (s + 1.0)));
}

}  // namespace linesol
