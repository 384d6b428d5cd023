// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace linesol {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule (Newton iteration on P_n).
GaussRule gauss_legendre(int n);

struct QuadratureOptions {
  double rel_tol = 1e-14;
  double abs_tol = 1e-300;
  int initial_panels = 8;
  int max_depth = 16;
};

/// Adaptive composite Gauss–Legendre on [lo, hi]. Panels are bisected until
/// the 20-point estimate on a panel agrees with the sum over its two halves.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opts = {});

/// ∫_ℝ f for an even integrand, truncated to [-half_width, half_width].
double integrate_even(const std::function<double(double)>& f, double half_width,
                      const QuadratureOptions& opts = {});

}  // namespace linesol
