// SPDX-License-Identifier: Apache-2.0
#include "linesol/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace linesol {

GaussRule gauss_legendre(int n) {
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre: n must be positive");
  }
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) {
        break;
      }
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

namespace {

const GaussRule& rule20() {
  static const GaussRule r = gauss_legendre(20);
  return r;
}

double panel(const std::function<double(double)>& f, double lo, double hi) {
  const GaussRule& r = rule20();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s += r.weights[i] * f(mid + half * r.nodes[i]);
  }
  return s * half;
}

double refine(const std::function<double(double)>& f, double lo, double hi,
              double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = panel(f, lo, mid);
  const double right = panel(f, mid, hi);
  const double split = left + right;
  // tol is not halved on descent: the 20-point rule converges fast enough on
  // smooth panels, and halving would chase round-off indefinitely.
  if (depth <= 0 || std::fabs(split - whole) <= tol) {
    return split;
  }
  return refine(f, lo, mid, left, tol, depth - 1) +
         refine(f, mid, hi, right, tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureOptions& opts) {
  const int n = std::max(1, opts.initial_panels);
  const double h = (hi - lo) / n;
  std::vector<double> coarse(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    coarse[i] = panel(f, lo + i * h, lo + (i + 1) * h);
    total += coarse[i];
  }
  const double tol = std::max(opts.abs_tol, opts.rel_tol * std::fabs(total)) / n;
  double result = 0.0;
  for (int i = 0; i < n; ++i) {
    result += refine(f, lo + i * h, lo + (i + 1) * h, coarse[i], tol, opts.max_depth);
  }
  return result;
}

double integrate_even(const std::function<double(double)>& f, double half_width,
                      const QuadratureOptions& opts) {
  return 2.0 * integrate(f, 0.0, half_width, opts);
}

}  // namespace linesol
