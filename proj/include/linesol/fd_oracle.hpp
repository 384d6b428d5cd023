// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference oracle for the reduction: re-solves the auxiliary
// equation on a stencil around (ω, a) and differences φ and F_∥. Shares
// nothing with the analytic derivative code beyond solve_auxiliary itself.
#pragma once

#include <map>
#include <tuple>

#include "linesol/lyapunov_schmidt.hpp"

namespace linesol {

/// Steps in a; the ω steps are these times min(1, ω_p), since ω-derivatives
/// grow like ω^{-k} at small ω_p.
struct OracleSteps {
  double first = 1e-3;
  double second = 1e-3;
  // Converged auxiliary solutions carry a rounding floor near 1e-13, which a
  // third difference amplifies by 1/h³; 2e-2 keeps that below the stencil
  // truncation error.
  double third = 2e-2;
};

class FiniteDifferenceOracle {
 public:
  FiniteDifferenceOracle(const LSContext& ctx, double omega, double a, OracleSteps steps = {});

  /// All stencils are fourth order: 5-point first and second differences,
  /// the 6-point third difference, and tensor products of 5-point stencils
  /// for the mixed derivatives.
  DerivativeBundle phi(int order);
  FparBundle fpar(int order);

  int solves() const { return static_cast<int>(cache_.size()); }

 private:
  // state at (ω + i hω, a + j ha) for the steps of the given order
  const LSState& at(int order, int i, int j);

  const LSContext& ctx_;
  double omega_, a_;
  OracleSteps steps_;
  double w_scale_;
  std::map<std::tuple<int, int, int>, LSState> cache_;
};

}  // namespace linesol
