// SPDX-License-Identifier: Apache-2.0
#include "linesol/spectral.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "linesol/closed_form.hpp"
#include "linesol/samples.hpp"

namespace linesol {

namespace {

struct Band {
  int n = 0;
  int m = 0;
  Eigen::MatrixXd low;  // low(i, d) = B(i, i - d)
};

Band to_band(const Eigen::SparseMatrix<double>& B) {
  Band b;
  b.n = static_cast<int>(B.rows());
  for (int col = 0; col < B.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, col); it; ++it) {
      b.m = std::max(b.m, static_cast<int>(it.row() - it.col()));
    }
  }
  b.low = Eigen::MatrixXd::Zero(b.n, b.m + 1);
  for (int col = 0; col < B.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, col); it; ++it) {
      const int d = static_cast<int>(it.row() - it.col());
      if (d >= 0) b.low(it.row(), d) = it.value();
    }
  }
  return b;
}

int band_inertia(const Band& b, double sigma, double scale) {
  const int n = b.n, m = b.m;
  Eigen::VectorXd d(n);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, m + 1);  // L(i, i - k) below the diagonal
  int neg = 0;
  const double tiny = std::numeric_limits<double>::epsilon() * scale;
  for (int i = 0; i < n; ++i) {
    const int k0 = std::max(0, i - m);
    for (int k = k0; k < i; ++k) {
      double s = b.low(i, i - k);
      for (int l = k0; l < k; ++l) {
        if (k - l > m) continue;
        s -= L(i, i - l) * L(k, k - l) * d(l);
      }
      L(i, i - k) = s / d(k);
    }
    double di = b.low(i, 0) - sigma;
    for (int k = k0; k < i; ++k) di -= L(i, i - k) * L(i, i - k) * d(k);
    if (std::fabs(di) < tiny) di = (di < 0.0) ? -tiny : tiny;
    d(i) = di;
    if (di < 0.0) ++neg;
  }
  return neg;
}

void gershgorin(const Eigen::SparseMatrix<double>& B, double& lo, double& hi) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(B.rows());
  Eigen::VectorXd rad = Eigen::VectorXd::Zero(B.rows());
  for (int col = 0; col < B.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(B, col); it; ++it) {
      if (it.row() == it.col()) {
        diag(it.row()) = it.value();
      } else {
        rad(it.row()) += std::fabs(it.value());
      }
    }
  }
  lo = (diag - rad).minCoeff();
  hi = (diag + rad).maxCoeff();
}

}  // namespace

int sturm_count(const Eigen::SparseMatrix<double>& B, double sigma) {
  double lo, hi;
  gershgorin(B, lo, hi);
  return band_inertia(to_band(B), sigma, std::max(std::fabs(lo), std::fabs(hi)));
}

EigenReport lowest_eigenpairs(const ModeOperator& op, int k, Parity parity,
                              const EigenOptions& opts) {
  if (k < 1) throw std::invalid_argument("lowest_eigenpairs: k must be at least 1");
  const Eigen::SparseMatrix<double> B = op.symmetric_matrix(parity);
  const int n = static_cast<int>(B.rows());
  if (k > n) throw std::invalid_argument("lowest_eigenpairs: k exceeds the problem size");
  const Band band = to_band(B);
  double glo, ghi;
  gershgorin(B, glo, ghi);
  const double scale = std::max({std::fabs(glo), std::fabs(ghi), 1.0});
  const double bis_tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;

  EigenReport rep;
  rep.mode = op.n;
  rep.parity = parity;
  rep.threshold = op.shift;
  rep.continuum_band = 5.0 / (op.grid.L * op.grid.L);
  const Eigen::VectorXd wsqrt = op.weights(parity).cwiseSqrt();

  std::vector<Eigen::VectorXd> found;  // symmetric coordinates
  for (int i = 0; i < k; ++i) {
    // smallest σ with count(σ) ≥ i+1
    double lo = glo - 1.0, hi = ghi + 1.0;
    for (int it = 0; it < 200 && hi - lo > bis_tol; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (band_inertia(band, mid, scale) >= i + 1) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double lam_b = 0.5 * (lo + hi);
    const double sigma = lam_b - opts.shift * std::max(1.0, std::fabs(lam_b));

    Eigen::SparseMatrix<double> S = B;
    for (int r = 0; r < n; ++r) S.coeffRef(r, r) -= sigma;
    S.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(S);
    if (lu.info() != Eigen::Success) {
      throw EigenError("lowest_eigenpairs: shifted factorization failed", NAN);
    }
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
    for (int r = 0; r < n; r += 3) v(r) += 0.5;
    v.normalize();
    double rho = lam_b, res = INFINITY;
    int extra = -1;  // counts steps after convergence
    for (int it = 0; it < opts.max_iter + opts.extra_steps && extra < opts.extra_steps; ++it) {
      v = lu.solve(v);
      for (const auto& u : found) v -= u.dot(v) * u;
      v.normalize();
      const Eigen::VectorXd Bv = B * v;
      rho = v.dot(Bv);
      res = (Bv - rho * v).norm();
      if (extra >= 0 || res <= opts.tol * std::max(1.0, std::fabs(rho))) ++extra;
    }
    if (!(res <= opts.tol * std::max(1.0, std::fabs(rho)))) {
      throw EigenError("lowest_eigenpairs: inverse iteration did not converge", res);
    }
    found.push_back(v);
    // fix the sign so the largest component is positive (deterministic output)
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    rep.eigenvalues.push_back(rho);
    rep.residuals.push_back(res);
    rep.predicted.push_back(NAN);
    rep.near_continuum.push_back(rho >= rep.threshold - rep.continuum_band);
    rep.vectors.push_back(v.cwiseQuotient(wsqrt));
  }
  return rep;
}

EigenReport soliton_block_spectrum(const Grid& g, double p, double omega, int n, Parity parity,
                                   int k, const EigenOptions& opts) {
  const SymField r = sample_soliton(g, p, omega);
  const LinearizedOperator lp = assemble_linearized(g, p, omega, r, LinFactor::p_times);
  EigenReport rep = lowest_eigenpairs(lp.block(n), k, parity, opts);
  const double nn = double(n) * n;
  rep.predicted[0] = parity == Parity::even_x ? nn - omega / omega_p(p) : nn;
  return rep;
}

double ground_state_identity_residual(const Grid& g, double p, double omega) {
  const SolitonParams sp(p, omega);
  const SymField f =
      SymField::sample(g, 0, [&](double x) { return soliton_power(sp, x, 0.5 * (p + 1.0)); });
  const SymField r = sample_soliton(g, p, omega);
  const LinearizedOperator lp = assemble_linearized(g, p, omega, r, LinFactor::p_times);
  const SymField res = lp.apply(f) + (omega / omega_p(p)) * f;
  return norm(res) / norm(f);
}

SpectrumScan spectrum_scan(const Grid& g, double p, const std::vector<double>& omegas,
                           const EigenOptions& opts) {
  SpectrumScan scan;
  scan.p = p;
  const double wp = omega_p(p);
  scan.slope_formula = -1.0 / wp;
  for (double w : omegas) {
    const SymField r = sample_soliton(g, p, w);
    const LinearizedOperator lp = assemble_linearized(g, p, w, r, LinFactor::p_times);
    std::vector<std::pair<double, int>> vals;
    for (int n = 0; n < g.n_modes; ++n) {
      const EigenReport rep = lowest_eigenpairs(lp.block(n), n == 0 ? 2 : 1, Parity::even_x, opts);
      for (double v : rep.eigenvalues) vals.emplace_back(v, n);
    }
    std::sort(vals.begin(), vals.end());
    scan.rows.push_back({w, vals[1].first, 1.0 - w / wp, vals[0].first, -w / wp, vals[1].second});
  }
  for (size_t i = 0; i + 1 < scan.rows.size(); ++i) {
    const auto& a = scan.rows[i];
    const auto& b = scan.rows[i + 1];
    scan.fd_slopes.push_back((b.lambda_measured - a.lambda_measured) / (b.omega - a.omega));
  }
  // least-squares slope
  const double nrow = static_cast<double>(scan.rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : scan.rows) {
    sx += r.omega;
    sy += r.lambda_measured;
    sxx += r.omega * r.omega;
    sxy += r.omega * r.lambda_measured;
  }
  const double den = nrow * sxx - sx * sx;
  scan.slope_fit = scan.rows.size() >= 2 ? (nrow * sxy - sx * sy) / den : NAN;
  return scan;
}

nlohmann::json to_json(const EigenReport& r) {
  nlohmann::json j;
  j["mode"] = r.mode;
  j["parity"] = r.parity == Parity::even_x ? "even_x" : "odd_x";
  j["threshold"] = r.threshold;
  j["continuum_band"] = r.continuum_band;
  j["eigenvalues"] = r.eigenvalues;
  j["residuals"] = r.residuals;
  nlohmann::json pred = nlohmann::json::array();
  for (double v : r.predicted) pred.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json());
  j["predicted"] = pred;
  j["near_continuum"] = r.near_continuum;
  return j;
}

nlohmann::json to_json(const SpectrumScan& s) {
  nlohmann::json j;
  j["p"] = s.p;
  j["slope_fit"] = s.slope_fit;
  j["slope_formula"] = s.slope_formula;
  j["fd_slopes"] = s.fd_slopes;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"omega", r.omega},
                    {"lambda_measured", r.lambda_measured},
                    {"lambda_formula", r.lambda_formula},
                    {"ground_measured", r.ground_measured},
                    {"ground_formula", r.ground_formula},
                    {"lambda_mode", r.lambda_mode}});
  }
  j["rows"] = rows;
  return j;
}

}  // namespace linesol
