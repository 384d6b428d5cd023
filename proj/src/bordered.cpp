// SPDX-License-Identifier: Apache-2.0
#include "linesol/bordered.hpp"

#include <algorithm>
#include <cmath>

namespace linesol {

namespace {
constexpr double kPivotFloor = 1e-14;
constexpr int kMaxRefine = 10;
}  // namespace

BandLU::BandLU(int n, int bw, const std::vector<Eigen::Triplet<double>>& entries)
    : n_(n), bw_(bw), width_(3 * bw + 1) {
  a_.assign(static_cast<size_t>(n) * (2 * bw + 1), 0.0);
  for (const auto& t : entries) {
    const int i = t.row(), c = t.col();
    if (std::abs(i - c) > bw) throw GridMismatch("BandLU: entry outside the band");
    a_[static_cast<size_t>(i) * (2 * bw + 1) + (c - i + bw)] += t.value();
  }
  double amax = 0.0;
  for (double v : a_) amax = std::max(amax, std::fabs(v));
  if (amax == 0.0) throw SingularSystem("BandLU: zero matrix");
  const double floor = kPivotFloor * amax;

  // u row i stores column c at offset c - i + bw, c ∈ [i - bw, i + 2bw]
  u_.assign(static_cast<size_t>(n) * width_, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < 2 * bw + 1; ++o) {
      u_[static_cast<size_t>(i) * width_ + o] = a_[static_cast<size_t>(i) * (2 * bw + 1) + o];
    }
  }
  l_.assign(static_cast<size_t>(n) * bw, 0.0);
  piv_.resize(n);
  auto U = [&](int i, int c) -> double& { return u_[static_cast<size_t>(i) * width_ + (c - i + bw)]; };

  for (int k = 0; k < n; ++k) {
    const int last = std::min(n - 1, k + bw);
    int r = k;
    double best = std::fabs(U(k, k));
    for (int i = k + 1; i <= last; ++i) {
      if (std::fabs(U(i, k)) > best) {
        best = std::fabs(U(i, k));
        r = i;
      }
    }
    piv_[k] = r;
    const int cend = std::min(n - 1, k + 2 * bw);
    if (r != k) {
      for (int c = k; c <= cend; ++c) std::swap(U(k, c), U(r, c));
    }
    double& pk = U(k, k);
    if (!std::isfinite(pk)) throw SingularSystem("BandLU: non-finite pivot");
    if (std::fabs(pk) < floor) {
      pk = pk < 0.0 ? -floor : floor;
      ++floored_;
    }
    for (int i = k + 1; i <= last; ++i) {
      const double m = U(i, k) / pk;
      l_[static_cast<size_t>(k) * bw + (i - k - 1)] = m;
      U(i, k) = 0.0;
      if (m == 0.0) continue;
      for (int c = k + 1; c <= cend; ++c) U(i, c) -= m * U(k, c);
    }
  }
}

void BandLU::solve_in_place(Eigen::VectorXd& b) const {
  const int n = n_, bw = bw_;
  for (int k = 0; k < n; ++k) {
    if (piv_[k] != k) std::swap(b(k), b(piv_[k]));
    const double bk = b(k);
    if (bk == 0.0) continue;
    const int last = std::min(n - 1, k + bw);
    for (int i = k + 1; i <= last; ++i) b(i) -= l_[static_cast<size_t>(k) * bw + (i - k - 1)] * bk;
  }
  for (int k = n - 1; k >= 0; --k) {
    const double* row = &u_[static_cast<size_t>(k) * width_];
    double s = b(k);
    const int cend = std::min(n - 1, k + 2 * bw);
    for (int c = k + 1; c <= cend; ++c) s -= row[c - k + bw] * b(c);
    b(k) = s / row[bw];
  }
}

Eigen::VectorXd BandLU::solve_refined(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = b;
  solve_in_place(x);
  double last = INFINITY;
  for (int it = 0; it < kMaxRefine; ++it) {
    Eigen::VectorXd d = b - multiply(x);
    solve_in_place(d);
    const double step = d.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(step) || step >= last) break;
    x += d;
    last = step;
    if (step <= 1e-16 * x.lpNorm<Eigen::Infinity>()) break;
  }
  if (!x.allFinite()) throw SingularSystem("BandLU: non-finite solution");
  return x;
}

Eigen::VectorXd BandLU::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(n_);
  const int w = 2 * bw_ + 1;
  for (int i = 0; i < n_; ++i) {
    const double* row = &a_[static_cast<size_t>(i) * w];
    const int c0 = std::max(0, i - bw_), c1 = std::min(n_ - 1, i + bw_);
    double s = 0.0;
    for (int c = c0; c <= c1; ++c) s += row[c - i + bw_] * x(c);
    y(i) = s;
  }
  return y;
}

BorderedSolver::BorderedSolver(const LinearizedOperator& A, const Eigen::VectorXd& col,
                               const Eigen::VectorXd& row, double corner)
    : col_(col), row_(row), corner_(corner) {
  const int n = A.grid.n_modes * A.grid.half();
  if (col.size() != n || row.size() != n) {
    throw GridMismatch("BorderedSolver: border length does not match the operator");
  }
  const auto t = A.triplets();
  int bw = 0;
  for (const auto& e : t) bw = std::max(bw, std::abs(e.row() - e.col()));
  lu_ = BandLU(n, bw, t);
  y_ = col_;
  lu_.solve_in_place(y_);
  schur_ = corner_ - row_.dot(y_);
  if (!std::isfinite(schur_) || schur_ == 0.0) {
    throw SingularSystem("BorderedSolver: singular bordered matrix");
  }
}

std::pair<Eigen::VectorXd, double> BorderedSolver::eliminate(const Eigen::VectorXd& rhs,
                                                             double extra) const {
  Eigen::VectorXd z = rhs;
  lu_.solve_in_place(z);
  const double mu = (extra - row_.dot(z)) / schur_;
  z -= mu * y_;
  return {std::move(z), mu};
}

std::pair<Eigen::VectorXd, double> BorderedSolver::solve(const Eigen::VectorXd& rhs,
                                                         double rhs_extra) const {
  if (rhs.size() != lu_.size()) throw GridMismatch("BorderedSolver: rhs length mismatch");
  auto [x, mu] = eliminate(rhs, rhs_extra);
  double last = INFINITY;
  for (int it = 0; it < kMaxRefine; ++it) {
    const Eigen::VectorXd res = rhs - lu_.multiply(x) - mu * col_;
    const double res_extra = rhs_extra - row_.dot(x) - corner_ * mu;
    auto [dx, dmu] = eliminate(res, res_extra);
    const double step = std::max(dx.lpNorm<Eigen::Infinity>(), std::fabs(dmu));
    const double size = std::max(x.lpNorm<Eigen::Infinity>(), std::fabs(mu));
    if (!std::isfinite(step)) break;
    if (step >= last) break;  // refinement stalled at rounding level
    x += dx;
    mu += dmu;
    last = step;
    if (step <= 1e-16 * size) break;
  }
  if (!x.allFinite() || !std::isfinite(mu)) {
    throw SingularSystem("BorderedSolver: non-finite solution (singular bordered matrix)");
  }
  return {std::move(x), mu};
}

Eigen::VectorXd flat_weights(const Grid& g) {
  const int N = g.n_modes;
  Eigen::VectorXd w(N * g.half());
  for (int j = 0; j < g.half(); ++j) {
    for (int n = 0; n < N; ++n) w(j * N + n) = g.quad_weight(j) * g.mode_weight(n);
  }
  return w;
}

}  // namespace linesol
