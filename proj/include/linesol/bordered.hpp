// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "linesol/operators.hpp"

namespace linesol {

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Banded LU with partial pivoting (row interchanges within the band).
/// Pivots below `pivot_floor · max|A|` are replaced by that floor; callers
/// that need exact solves refine against the original matrix.
class BandLU {
 public:
  BandLU() = default;
  BandLU(int n, int bw, const std::vector<Eigen::Triplet<double>>& entries);

  void solve_in_place(Eigen::VectorXd& b) const;
  /// Solve followed by iterative refinement against the unfactored matrix.
  Eigen::VectorXd solve_refined(const Eigen::VectorXd& b) const;
  /// y = A x with the unfactored matrix.
  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

  int size() const { return n_; }
  int bandwidth() const { return bw_; }
  int floored_pivots() const { return floored_; }

 private:
  int n_ = 0, bw_ = 0, width_ = 0;
  std::vector<double> a_;     // original band, row i holds columns [i-bw, i+bw]
  std::vector<double> u_;     // factored rows, row i holds columns [i-bw, i+2bw]
  std::vector<double> l_;     // multipliers, column k holds rows k+1..k+bw
  std::vector<int> piv_;
  int floored_ = 0;
};

/// Solver for the bordered matrix
///   [ A    c ]
///   [ rᵀ   d ]
/// where A is a linearized operator in the interleaved ordering (banded),
/// c a column and r a row over the same unknowns, d a scalar. Block
/// elimination on the band factorization of A, followed by iterative
/// refinement against the full bordered matrix so that a nearly singular A
/// (the kernel direction at the bifurcation point) costs no accuracy.
class BorderedSolver {
 public:
  BorderedSolver(const LinearizedOperator& A, const Eigen::VectorXd& col,
                 const Eigen::VectorXd& row, double corner);

  /// Returns (x, μ) with A x + μ c = rhs, rᵀx + dμ = rhs_extra.
  std::pair<Eigen::VectorXd, double> solve(const Eigen::VectorXd& rhs, double rhs_extra) const;

  int size() const { return lu_.size() + 1; }

 private:
  std::pair<Eigen::VectorXd, double> eliminate(const Eigen::VectorXd& rhs, double extra) const;

  BandLU lu_;
  Eigen::VectorXd col_, row_, y_;  // y = A⁻¹c
  double corner_ = 0.0, schur_ = 0.0;
};

/// Flattened inner-product weights w_n · q_j in the interleaved ordering, so
/// that ⟨u, v⟩ = Σ W_g u_g v_g.
Eigen::VectorXd flat_weights(const Grid& g);

}  // namespace linesol
