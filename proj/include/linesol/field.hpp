// SPDX-License-Identifier: Apache-2.0
//
// Fields on the truncated strip [-L, L] × 𝕋 that are even in y, stored as
// cosine modes u(x, y) = Σ_n u_n(x) cos(n y). Only the half grid x_j = j·dx,
// j = 0..M-1 with M = (nx-1)/2, is stored; the mirror half is reconstructed
// exactly on access and x = ±L is a homogeneous Dirichlet node.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace linesol {

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Parity { even_x, odd_x };

struct Grid {
  double L = 0.0;
  int nx = 0;
  int n_modes = 0;
  int fd_order = 8;  // even, 2..16

  Grid() = default;
  /// Throws std::invalid_argument on nx even or < 5, L ≤ 0, n_modes < 1 or a
  /// bad stencil order.
  Grid(double L_, int nx_, int n_modes_, int fd_order_ = 8);

  int half() const { return (nx - 1) / 2; }
  double dx() const { return 2.0 * L / (nx - 1); }
  double x(int j) const { return j * dx(); }
  /// Trapezoid weight of half-grid node j for an even integrand on [-L, L].
  double quad_weight(int j) const { return j == 0 ? dx() : 2.0 * dx(); }
  /// ∫_𝕋 cos²(n y) dy.
  double mode_weight(int n) const;
  /// Number of y-collocation nodes on [0, π], endpoints included.
  int n_colloc() const { return 3 * n_modes + 1; }
  double y(int k) const;
  /// Trapezoid weight of node k, normalized so that Σ wt_k = 2π.
  double y_weight(int k) const;

  /// Central second-difference weights c_0..c_m for order 2m.
  const std::vector<double>& stencil() const;

  bool operator==(const Grid& o) const {
    return L == o.L && nx == o.nx && n_modes == o.n_modes && fd_order == o.fd_order;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  std::vector<double> stencil_;
};

/// Weights for a (2m)-th order central approximation of d²/dx².
std::vector<double> second_difference_weights(int order);

class SymField {
 public:
  SymField() = default;
  SymField(const Grid& g, Parity par = Parity::even_x);

  static SymField zero(const Grid& g, Parity par = Parity::even_x) { return SymField(g, par); }
  /// Samples f on mode n; all other modes are zero.
  static SymField sample(const Grid& g, int n, const std::function<double(double)>& f,
                         Parity par = Parity::even_x);

  const Grid& grid() const { return grid_; }
  Parity parity() const { return parity_; }
  int n_modes() const { return grid_.n_modes; }
  int half() const { return grid_.half(); }

  /// Half-grid storage, rows = modes, columns = j.
  Eigen::MatrixXd& coeffs() { return c_; }
  const Eigen::MatrixXd& coeffs() const { return c_; }
  double operator()(int n, int j) const { return c_(n, j); }
  double& operator()(int n, int j) { return c_(n, j); }

  /// Value of mode n at full-grid index i ∈ [0, nx), mirrored from storage.
  double full_value(int n, int i) const;
  /// Mode matrix on the full grid [n_modes × nx].
  Eigen::MatrixXd full_coeffs() const;
  static SymField from_full(const Grid& g, const Eigen::MatrixXd& full,
                            Parity par = Parity::even_x);

  /// Flattened unknown vector, index g = j·n_modes + n.
  Eigen::VectorXd flatten() const;
  static SymField unflatten(const Grid& g, const Eigen::VectorXd& v,
                            Parity par = Parity::even_x);

  /// y ↦ y + π, i.e. mode n gets sign (-1)^n.
  SymField shift_half_period() const;

  SymField& operator+=(const SymField& o);
  SymField& operator-=(const SymField& o);
  SymField& operator*=(double s);

 private:
  Grid grid_;
  Parity parity_ = Parity::even_x;
  Eigen::MatrixXd c_;
};

SymField operator+(SymField a, const SymField& b);
SymField operator-(SymField a, const SymField& b);
SymField operator*(double s, SymField a);

/// ⟨f, g⟩ = Σ_n w_n ∫ f_n g_n dx. Throws GridMismatch.
double inner_product(const SymField& f, const SymField& g);
double norm(const SymField& f);
/// max over all half-grid nodes and modes of |f|.
double max_abs(const SymField& f);

/// Physical values u(x_j, y_k), rows k = 0..K-1, columns j.
Eigen::MatrixXd to_physical(const SymField& u);
/// Discrete cosine analysis of physical values back onto n_modes modes.
SymField from_physical(const Grid& g, const Eigen::MatrixXd& phys,
                       Parity par = Parity::even_x);

/// Pointwise product in physical space, projected back to modes.
SymField multiply(const SymField& a, const SymField& b);
/// Applies a pointwise function in physical space.
SymField map_physical(const SymField& u, const std::function<double(double)>& f);

/// cos(n y_k) table [K × n_modes].
Eigen::MatrixXd cos_table(const Grid& g);

}  // namespace linesol
