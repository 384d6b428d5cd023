// SPDX-License-Identifier: Apache-2.0
//
// Discrete F(ω, u) = -Δu + ωu - |u|^{p-1}u and its linearizations on the
// half-grid cosine representation of field.hpp.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <vector>

#include "linesol/field.hpp"

namespace linesol {

class PositivityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Values of |φ| below this are treated as zero when a negative power is taken.
inline constexpr double kPowerFloor = 1e-280;

/// sign(t)|t|^p.
double power_nl(double t, double p);
/// k-th derivative of t ↦ sign(t)|t|^p, i.e. p(p-1)⋯(p-k+1)|t|^{p-k} with the
/// parity sign; 0 where a negative power meets |t| < kPowerFloor.
double power_nl_derivative(double t, double p, int k);

/// One cosine block -d²/dx² + shift - diag(potential) on the half grid.
struct ModeOperator {
  Grid grid;
  int n = 0;
  double shift = 0.0;          // ω + n²
  Eigen::VectorXd potential;   // half grid, length M

  int size(Parity par) const { return par == Parity::even_x ? grid.half() : grid.half() - 1; }
  /// Folded matrix acting on the parity-restricted unknowns. Symmetric with
  /// respect to the trapezoid weights, not in the plain sense.
  Eigen::SparseMatrix<double> matrix(Parity par) const;
  /// Similarity transform W^{1/2} A W^{-1/2}, symmetric.
  Eigen::SparseMatrix<double> symmetric_matrix(Parity par) const;
  /// Trapezoid weights of the restricted unknowns (used by the transform).
  Eigen::VectorXd weights(Parity par) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v, Parity par) const;
};

/// Applies -d²/dx² to half-grid profile `in` (length M) with even or odd folding.
void apply_neg_dxx(const Grid& g, const double* in, double* out, Parity par,
                   int stride_in = 1, int stride_out = 1);

enum class LinFactor { p_times, one_times };

/// -Δ + ω - C with C the (possibly mode-coupling) multiplication operator by a
/// potential V(x, y), acting on even_x fields. In the collocation sense
/// C_j[n][m] = (1/w_n) Σ_k wt_k V(x_j, y_k) cos(n y_k) cos(m y_k).
struct LinearizedOperator {
  Grid grid;
  double omega = 0.0;
  std::vector<Eigen::MatrixXd> coupling;  // per half-grid node, N×N
  bool decoupled = false;                 // potential independent of y

  SymField apply(const SymField& u) const;
  /// Mode block with the diagonal of the coupling as its potential. Exact
  /// when `decoupled`.
  ModeOperator block(int n) const;
  std::vector<ModeOperator> blocks() const;
  /// Triplets of the full matrix in the interleaved ordering g = j·N + n.
  std::vector<Eigen::Triplet<double>> triplets() const;
  Eigen::SparseMatrix<double> matrix() const;
};

/// Multiplication operator built from physical potential values V(x_j, y_k).
LinearizedOperator make_linear_operator(const Grid& g, double omega,
                                        const Eigen::MatrixXd& potential_phys,
                                        bool y_independent);

/// -∂ₓ²u - ∂ᵧ²u + ωu mode by mode.
SymField apply_linear_part(const SymField& u, double omega);
/// |u|^{p-1}u, evaluated on the y-collocation grid and analyzed back.
SymField nonlinear_term(const SymField& u, double p);
/// F(ω, u). Throws GridMismatch if u does not live on g.
SymField apply_F(const Grid& g, double p, double omega, const SymField& u);

/// L_± blocks -Δ + ω - c|base|^{p-1}; c = p for L_+, c = 1 for L_-.
/// Throws PositivityError if p < 2 and base ≤ 0 at some collocation node.
LinearizedOperator assemble_linearized(const Grid& g, double p, double omega,
                                       const SymField& base, LinFactor factor);

/// True if every mode other than 0 is identically zero.
bool is_y_independent(const SymField& u);

}  // namespace linesol
