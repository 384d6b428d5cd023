// SPDX-License-Identifier: Apache-2.0
#include "linesol/field.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace linesol {

std::vector<double> second_difference_weights(int order) {
  if (order < 2 || order > 16 || order % 2 != 0) {
    throw std::invalid_argument("fd_order must be even and in [2, 16], got " +
                                std::to_string(order));
  }
  const int m = order / 2;
  auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  std::vector<double> c(m + 1, 0.0);
  double sum = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double sgn = (k % 2 == 1) ? 1.0 : -1.0;
    c[k] = 2.0 * sgn * fact(m) * fact(m) / (double(k) * k * fact(m - k) * fact(m + k));
    sum += c[k];
  }
  c[0] = -2.0 * sum;
  return c;
}

Grid::Grid(double L_, int nx_, int n_modes_, int fd_order_)
    : L(L_), nx(nx_), n_modes(n_modes_), fd_order(fd_order_) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("grid half-width L must be positive");
  }
  if (nx < 5 || nx % 2 == 0) {
    throw std::invalid_argument("nx must be odd and at least 5, got " + std::to_string(nx));
  }
  if (n_modes < 1) {
    throw std::invalid_argument("n_modes must be at least 1");
  }
  stencil_ = second_difference_weights(fd_order);
  if (static_cast<int>(stencil_.size()) - 1 >= half()) {
    throw std::invalid_argument("grid too coarse for the stencil width");
  }
}

double Grid::mode_weight(int n) const {
  return n == 0 ? 2.0 * std::numbers::pi : std::numbers::pi;
}

double Grid::y(int k) const { return std::numbers::pi * k / (n_colloc() - 1); }

double Grid::y_weight(int k) const {
  const double dy = std::numbers::pi / (n_colloc() - 1);
  return (k == 0 || k == n_colloc() - 1) ? dy : 2.0 * dy;
}

const std::vector<double>& Grid::stencil() const { return stencil_; }

Eigen::MatrixXd cos_table(const Grid& g) {
  const int K = g.n_colloc();
  Eigen::MatrixXd t(K, g.n_modes);
  // Fill the first half and mirror with cos(n(π - y)) = (-1)^n cos(n y) so that
  // y ↦ y + π acts on collocation values as an exact row reversal.
  for (int k = 0; 2 * k <= K - 1; ++k) {
    for (int n = 0; n < g.n_modes; ++n) {
      double c = (k == 0) ? 1.0 : std::cos(n * g.y(k));
      if (2 * k == K - 1) {
        c = (n % 2 == 1) ? 0.0 : ((n / 2) % 2 == 0 ? 1.0 : -1.0);
      }
      t(k, n) = c;
      t(K - 1 - k, n) = (n % 2 == 0) ? c : -c;
    }
  }
  return t;
}

SymField::SymField(const Grid& g, Parity par)
    : grid_(g), parity_(par), c_(Eigen::MatrixXd::Zero(g.n_modes, g.half())) {}

SymField SymField::sample(const Grid& g, int n, const std::function<double(double)>& f,
                          Parity par) {
  if (n < 0 || n >= g.n_modes) {
    throw std::out_of_range("SymField::sample: mode index out of range");
  }
  SymField u(g, par);
  for (int j = 0; j < g.half(); ++j) {
    u.c_(n, j) = f(g.x(j));
  }
  if (par == Parity::odd_x) {
    u.c_(n, 0) = 0.0;
  }
  return u;
}

double SymField::full_value(int n, int i) const {
  const int s = i - (grid_.nx - 1) / 2;
  const int a = s < 0 ? -s : s;
  if (a >= grid_.half()) {
    return 0.0;
  }
  const double v = c_(n, a);
  return (parity_ == Parity::odd_x && s < 0) ? -v : v;
}

Eigen::MatrixXd SymField::full_coeffs() const {
  Eigen::MatrixXd out(grid_.n_modes, grid_.nx);
  for (int n = 0; n < grid_.n_modes; ++n) {
    for (int i = 0; i < grid_.nx; ++i) {
      out(n, i) = full_value(n, i);
    }
  }
  return out;
}

SymField SymField::from_full(const Grid& g, const Eigen::MatrixXd& full, Parity par) {
  if (full.rows() != g.n_modes || full.cols() != g.nx) {
    throw GridMismatch("from_full: matrix shape does not match grid");
  }
  SymField u(g, par);
  const int mid = (g.nx - 1) / 2;
  for (int n = 0; n < g.n_modes; ++n) {
    for (int j = 0; j < g.half(); ++j) {
      u.c_(n, j) = full(n, mid + j);
    }
  }
  return u;
}

Eigen::VectorXd SymField::flatten() const {
  const int N = grid_.n_modes;
  Eigen::VectorXd v(N * grid_.half());
  for (int j = 0; j < grid_.half(); ++j) {
    for (int n = 0; n < N; ++n) {
      v(j * N + n) = c_(n, j);
    }
  }
  return v;
}

SymField SymField::unflatten(const Grid& g, const Eigen::VectorXd& v, Parity par) {
  const int N = g.n_modes;
  if (v.size() < N * g.half()) {
    throw GridMismatch("unflatten: vector too short for grid");
  }
  SymField u(g, par);
  for (int j = 0; j < g.half(); ++j) {
    for (int n = 0; n < N; ++n) {
      u.c_(n, j) = v(j * N + n);
    }
  }
  return u;
}

SymField SymField::shift_half_period() const {
  SymField out = *this;
  for (int n = 1; n < grid_.n_modes; n += 2) {
    out.c_.row(n) = -out.c_.row(n);
  }
  return out;
}

namespace {
void require_same(const SymField& a, const SymField& b, const char* what) {
  if (a.grid() != b.grid()) {
    throw GridMismatch(std::string(what) + ": fields live on different grids");
  }
}
}  // namespace

SymField& SymField::operator+=(const SymField& o) {
  require_same(*this, o, "operator+=");
  c_ += o.c_;
  return *this;
}

SymField& SymField::operator-=(const SymField& o) {
  require_same(*this, o, "operator-=");
  c_ -= o.c_;
  return *this;
}

SymField& SymField::operator*=(double s) {
  c_ *= s;
  return *this;
}

SymField operator+(SymField a, const SymField& b) { return a += b; }
SymField operator-(SymField a, const SymField& b) { return a -= b; }
SymField operator*(double s, SymField a) { return a *= s; }

double inner_product(const SymField& f, const SymField& g) {
  require_same(f, g, "inner_product");
  const Grid& gr = f.grid();
  double total = 0.0;
  for (int n = 0; n < gr.n_modes; ++n) {
    double s = 0.0;
    for (int j = 0; j < gr.half(); ++j) {
      s += gr.quad_weight(j) * f(n, j) * g(n, j);
    }
    total += gr.mode_weight(n) * s;
  }
  return total;
}

double norm(const SymField& f) { return std::sqrt(inner_product(f, f)); }

double max_abs(const SymField& f) { return f.coeffs().cwiseAbs().maxCoeff(); }

Eigen::MatrixXd to_physical(const SymField& u) {
  return cos_table(u.grid()) * u.coeffs();
}

SymField from_physical(const Grid& g, const Eigen::MatrixXd& phys, Parity par) {
  const Eigen::MatrixXd ct = cos_table(g);
  const int K = g.n_colloc();
  if (phys.rows() != K || phys.cols() != g.half()) {
    throw GridMismatch("from_physical: shape does not match grid");
  }
  Eigen::MatrixXd weighted = ct;
  for (int k = 0; k < K; ++k) {
    weighted.row(k) *= g.y_weight(k);
  }
  SymField u(g, par);
  u.coeffs() = weighted.transpose() * phys;
  for (int n = 0; n < g.n_modes; ++n) {
    u.coeffs().row(n) /= g.mode_weight(n);
  }
  return u;
}

SymField multiply(const SymField& a, const SymField& b) {
  require_same(a, b, "multiply");
  const Parity par = (a.parity() == b.parity()) ? Parity::even_x : Parity::odd_x;
  const Eigen::MatrixXd pa = to_physical(a);
  const Eigen::MatrixXd pb = to_physical(b);
  return from_physical(a.grid(), pa.cwiseProduct(pb), par);
}

SymField map_physical(const SymField& u, const std::function<double(double)>& f) {
  Eigen::MatrixXd ph = to_physical(u);
  for (Eigen::Index j = 0; j < ph.cols(); ++j) {
    for (Eigen::Index k = 0; k < ph.rows(); ++k) {
      ph(k, j) = f(ph(k, j));
    }
  }
  return from_physical(u.grid(), ph, u.parity());
}

}  // namespace linesol
