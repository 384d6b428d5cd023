// SPDX-License-Identifier: Apache-2.0
#include "linesol/operators.hpp"

#include <cmath>

namespace linesol {

double power_nl(double t, double p) {
  const double a = std::fabs(t);
  if (a == 0.0) return 0.0;
  const double v = std::pow(a, p);
  return t < 0.0 ? -v : v;
}

double power_nl_derivative(double t, double p, int k) {
  if (k == 0) return power_nl(t, p);
  double coef = 1.0;
  for (int i = 0; i < k; ++i) coef *= (p - i);
  const double e = p - k;
  const double a = std::fabs(t);
  if (e < 0.0 && a < kPowerFloor) return 0.0;
  if (a == 0.0) return e == 0.0 ? coef : 0.0;
  double v = coef * std::pow(a, e);
  // d/dt of sign(t)|t|^p alternates between odd and even functions
  if (k % 2 == 0 && t < 0.0) v = -v;
  return v;
}

void apply_neg_dxx(const Grid& g, const double* in, double* out, Parity par, int stride_in,
                   int stride_out) {
  const std::vector<double>& c = g.stencil();
  const int m = static_cast<int>(c.size()) - 1;
  const int M = g.half();
  const double inv = 1.0 / (g.dx() * g.dx());
  const bool odd = par == Parity::odd_x;
  for (int j = 0; j < M; ++j) {
    if (odd && j == 0) {
      out[0] = 0.0;
      continue;
    }
    double s = c[0] * in[j * stride_in];
    for (int k = 1; k <= m; ++k) {
      const int r = j + k;
      if (r < M) s += c[k] * in[r * stride_in];
      const int l = j - k;
      if (l >= 0) {
        s += c[k] * in[l * stride_in];
      } else if (-l < M) {
        s += (odd ? -c[k] : c[k]) * in[-l * stride_in];
      }
    }
    out[j * stride_out] = -s * inv;
  }
}

Eigen::VectorXd ModeOperator::weights(Parity par) const {
  const int sz = size(par);
  Eigen::VectorXd w(sz);
  for (int i = 0; i < sz; ++i) {
    const int j = par == Parity::even_x ? i : i + 1;
    w(i) = j == 0 ? 1.0 : 2.0;
  }
  return w;
}

Eigen::SparseMatrix<double> ModeOperator::matrix(Parity par) const {
  const std::vector<double>& c = grid.stencil();
  const int m = static_cast<int>(c.size()) - 1;
  const int M = grid.half();
  const double inv = 1.0 / (grid.dx() * grid.dx());
  const bool odd = par == Parity::odd_x;
  const int off = odd ? 1 : 0;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(size(par)) * (2 * m + 1));
  for (int j = off; j < M; ++j) {
    const int row = j - off;
    t.emplace_back(row, row, -c[0] * inv + shift - potential(j));
    for (int k = 1; k <= m; ++k) {
      const int r = j + k;
      if (r < M) t.emplace_back(row, r - off, -c[k] * inv);
      const int l = j - k;
      if (l >= off) {
        t.emplace_back(row, l - off, -c[k] * inv);
      } else if (l < 0 && -l < M) {
        t.emplace_back(row, -l - off, (odd ? c[k] : -c[k]) * inv);
      }
    }
  }
  Eigen::SparseMatrix<double> A(size(par), size(par));
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

Eigen::SparseMatrix<double> ModeOperator::symmetric_matrix(Parity par) const {
  Eigen::SparseMatrix<double> A = matrix(par);
  const Eigen::VectorXd s = weights(par).cwiseSqrt();
  for (int col = 0; col < A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      it.valueRef() *= s(it.row()) / s(it.col());
    }
  }
  return A;
}

Eigen::VectorXd ModeOperator::apply(const Eigen::VectorXd& v, Parity par) const {
  const int M = grid.half();
  const int off = par == Parity::odd_x ? 1 : 0;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(M);
  full.segment(off, M - off) = v;
  Eigen::VectorXd out(M);
  apply_neg_dxx(grid, full.data(), out.data(), par);
  out += (shift * full.array() - potential.array() * full.array()).matrix();
  return out.segment(off, M - off);
}

LinearizedOperator make_linear_operator(const Grid& g, double omega,
                                        const Eigen::MatrixXd& potential_phys,
                                        bool y_independent) {
  LinearizedOperator op;
  op.grid = g;
  op.omega = omega;
  op.decoupled = y_independent;
  const int N = g.n_modes;
  const int M = g.half();
  const int K = g.n_colloc();
  op.coupling.assign(M, Eigen::MatrixXd::Zero(N, N));
  if (y_independent) {
    for (int j = 0; j < M; ++j) {
      op.coupling[j].diagonal().setConstant(potential_phys(0, j));
    }
    return op;
  }
  const Eigen::MatrixXd ct = cos_table(g);
  Eigen::VectorXd inv_w(N);
  for (int n = 0; n < N; ++n) inv_w(n) = 1.0 / g.mode_weight(n);
  Eigen::MatrixXd scaled(K, N);
  for (int j = 0; j < M; ++j) {
    for (int k = 0; k < K; ++k) {
      scaled.row(k) = ct.row(k) * (g.y_weight(k) * potential_phys(k, j));
    }
    op.coupling[j] = inv_w.asDiagonal() * (ct.transpose() * scaled);
  }
  return op;
}

SymField LinearizedOperator::apply(const SymField& u) const {
  if (u.grid() != grid) throw GridMismatch("LinearizedOperator::apply: grid mismatch");
  SymField out = apply_linear_part(u, omega);
  const int M = grid.half();
  for (int j = 0; j < M; ++j) {
    out.coeffs().col(j) -= coupling[j] * u.coeffs().col(j);
  }
  if (u.parity() == Parity::odd_x) out.coeffs().col(0).setZero();
  return out;
}

ModeOperator LinearizedOperator::block(int n) const {
  ModeOperator b;
  b.grid = grid;
  b.n = n;
  b.shift = omega + double(n) * n;
  b.potential.resize(grid.half());
  for (int j = 0; j < grid.half(); ++j) b.potential(j) = coupling[j](n, n);
  return b;
}

std::vector<ModeOperator> LinearizedOperator::blocks() const {
  std::vector<ModeOperator> out;
  for (int n = 0; n < grid.n_modes; ++n) out.push_back(block(n));
  return out;
}

std::vector<Eigen::Triplet<double>> LinearizedOperator::triplets() const {
  const int N = grid.n_modes;
  const int M = grid.half();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(M) * N * (2 * grid.stencil().size() + N));
  for (int n = 0; n < N; ++n) {
    ModeOperator b;
    b.grid = grid;
    b.n = n;
    b.shift = omega + double(n) * n;
    b.potential = Eigen::VectorXd::Zero(M);
    const Eigen::SparseMatrix<double> A = b.matrix(Parity::even_x);
    for (int col = 0; col < A.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
        t.emplace_back(int(it.row()) * N + n, int(it.col()) * N + n, it.value());
      }
    }
  }
  for (int j = 0; j < M; ++j) {
    for (int n = 0; n < N; ++n) {
      for (int mm = 0; mm < N; ++mm) {
        const double v = coupling[j](n, mm);
        if (v != 0.0) t.emplace_back(j * N + n, j * N + mm, -v);
      }
    }
  }
  return t;
}

Eigen::SparseMatrix<double> LinearizedOperator::matrix() const {
  const int sz = grid.n_modes * grid.half();
  Eigen::SparseMatrix<double> A(sz, sz);
  const auto t = triplets();
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

SymField apply_linear_part(const SymField& u, double omega) {
  const Grid& g = u.grid();
  SymField out(g, u.parity());
  const int N = g.n_modes;
  // coeffs are column-major: mode n, node j sits at n + j·N
  const double* in = u.coeffs().data();
  double* o = out.coeffs().data();
  for (int n = 0; n < N; ++n) {
    apply_neg_dxx(g, in + n, o + n, u.parity(), N, N);
  }
  for (int n = 0; n < N; ++n) {
    out.coeffs().row(n) += (omega + double(n) * n) * u.coeffs().row(n);
  }
  return out;
}

SymField nonlinear_term(const SymField& u, double p) {
  return map_physical(u, [p](double t) { return power_nl(t, p); });
}

SymField apply_F(const Grid& g, double p, double omega, const SymField& u) {
  if (u.grid() != g) throw GridMismatch("apply_F: field does not live on the given grid");
  if (is_y_independent(u)) {
    // exact shortcut: collocation of a y-independent field is the field itself
    SymField out = apply_linear_part(u, omega);
    for (int j = 0; j < g.half(); ++j) out(0, j) -= power_nl(u(0, j), p);
    return out;
  }
  return apply_linear_part(u, omega) - nonlinear_term(u, p);
}

bool is_y_independent(const SymField& u) {
  if (u.n_modes() <= 1) return true;
  return u.coeffs().bottomRows(u.n_modes() - 1).cwiseAbs().maxCoeff() == 0.0;
}

LinearizedOperator assemble_linearized(const Grid& g, double p, double omega,
                                       const SymField& base, LinFactor factor) {
  if (base.grid() != g) throw GridMismatch("assemble_linearized: base field grid mismatch");
  const bool flat = is_y_independent(base);
  Eigen::MatrixXd phys = flat ? Eigen::MatrixXd(base.coeffs().topRows(1)) : to_physical(base);
  if (p < 2.0 && phys.minCoeff() <= 0.0) {
    throw PositivityError(
        "assemble_linearized: base field must be positive when p < 2 (|u|^{p-1} with "
        "p - 1 < 1 is not differentiable at 0)");
  }
  const double c = factor == LinFactor::p_times ? p : 1.0;
  for (Eigen::Index j = 0; j < phys.cols(); ++j) {
    for (Eigen::Index k = 0; k < phys.rows(); ++k) {
      phys(k, j) = c * std::pow(std::fabs(phys(k, j)), p - 1.0);
    }
  }
  return make_linear_operator(g, omega, phys, flat);
}

}  // namespace linesol
