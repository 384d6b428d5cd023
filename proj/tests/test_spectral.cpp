#include <cmath>
#include <random>

#include "doctest.h"
#include "linesol/closed_form.hpp"
#include "linesol/samples.hpp"
#include "linesol/spectral.hpp"

using namespace linesol;

namespace {
Grid grid_for(double omega_min) { return Grid(30.0 / std::sqrt(omega_min), 2049, 8); }
}  // namespace

TEST_CASE("sturm count and bisection agree with a dense solver") {
  const Grid g(20.0, 201, 3);
  const double p = 3.0, w = 1.0;
  const SymField r = sample_soliton(g, p, w);
  const auto lp = assemble_linearized(g, p, w, r, LinFactor::p_times);
  for (int n : {0, 1, 2}) {
    for (Parity par : {Parity::even_x, Parity::odd_x}) {
      const ModeOperator op = lp.block(n);
      const Eigen::MatrixXd B = Eigen::MatrixXd(op.symmetric_matrix(par));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
      const Eigen::VectorXd ev = es.eigenvalues();
      for (double s : {-5.0, -2.9, 0.0, 0.5, 1.2, 4.0}) {
        int cnt = 0;
        for (int i = 0; i < ev.size(); ++i) cnt += ev(i) < s;
        CHECK(sturm_count(op.symmetric_matrix(par), s) == cnt);
      }
      const EigenReport rep = lowest_eigenpairs(op, 4, par);
      for (int i = 0; i < 4; ++i) {
        CHECK(std::fabs(rep.eigenvalues[i] - ev(i)) < 1e-9 * std::max(1.0, std::fabs(ev(i))));
        CHECK(rep.residuals[i] < 1e-9);
      }
      for (int i = 1; i < 4; ++i) CHECK(rep.eigenvalues[i] >= rep.eigenvalues[i - 1]);
    }
  }
}

TEST_CASE("ground state and zero mode of the soliton linearization") {
  const double p = 3.0, w = 1.0;
  const Grid g = grid_for(w);
  const EigenReport even = soliton_block_spectrum(g, p, w, 0, Parity::even_x, 2);
  CHECK(std::fabs(even.eigenvalues[0] - (-3.0)) < 1e-6);
  CHECK(even.predicted[0] == doctest::Approx(-3.0));

  // ground eigenvector ∝ R^{(p+1)/2}
  const SolitonParams sp(p, w);
  SymField v(Grid(g.L, g.nx, 1), Parity::even_x);
  SymField f(Grid(g.L, g.nx, 1), Parity::even_x);
  for (int j = 0; j < g.half(); ++j) {
    v(0, j) = even.vectors[0](j);
    f(0, j) = soliton_power(sp, g.x(j), 0.5 * (p + 1.0));
  }
  const double overlap = std::fabs(inner_product(v, f)) / (norm(v) * norm(f));
  CHECK(overlap > 1.0 - 1e-8);

  const EigenReport odd = soliton_block_spectrum(g, p, w, 0, Parity::odd_x, 1);
  CHECK(std::fabs(odd.eigenvalues[0]) < 1e-6);
  SymField vo(Grid(g.L, g.nx, 1), Parity::odd_x);
  SymField d(Grid(g.L, g.nx, 1), Parity::odd_x);
  for (int j = 1; j < g.half(); ++j) {
    vo(0, j) = odd.vectors[0](j - 1);
    d(0, j) = soliton_derivatives(sp, g.x(j)).dR_dx;
  }
  CHECK(std::fabs(inner_product(vo, d)) / (norm(vo) * norm(d)) > 1.0 - 1e-8);

  CHECK(ground_state_identity_residual(g, p, w) < 1e-6);
  for (double pp : {1.5, 2.0, 5.0}) {
    CHECK(ground_state_identity_residual(grid_for(omega_p(pp)), pp, omega_p(pp)) < 1e-6);
  }
}

TEST_CASE("n = 1 block crosses zero at the bifurcation frequency") {
  const double p = 3.0;
  const Grid g = grid_for(0.3);
  for (double w : {0.3, 1.0 / 3.0, 0.4}) {
    const EigenReport r1 = soliton_block_spectrum(g, p, w, 1, Parity::even_x, 1);
    CHECK(std::fabs(r1.eigenvalues[0] - (1.0 - 3.0 * w)) < 1e-6);
    const EigenReport r0 = soliton_block_spectrum(g, p, w, 0, Parity::even_x, 1);
    CHECK(std::fabs(r0.eigenvalues[0] + 3.0 * w) < 1e-6);
  }
}

TEST_CASE("spectrum scan slope") {
  const double p = 3.0;
  const Grid g = grid_for(0.3);
  std::vector<double> ws;
  for (int i = 0; i <= 7; ++i) ws.push_back(0.3 + 0.01 * i);
  const SpectrumScan s = spectrum_scan(g, p, ws);
  for (const auto& row : s.rows) {
    CHECK(std::fabs(row.lambda_measured - row.lambda_formula) < 1e-6);
    CHECK(row.lambda_mode == 1);
    CHECK(std::fabs(row.ground_measured - row.ground_formula) < 1e-6);
  }
  CHECK(std::fabs(s.slope_fit + 3.0) < 1e-4);
  for (double sl : s.fd_slopes) CHECK(std::fabs(sl + 3.0) < 1e-4);
  const auto j = to_json(s);
  CHECK(j["rows"].size() == 8);
}

TEST_CASE("continuum flag and odd kernel placement") {
  const double p = 3.0, w = 1.0 / 3.0;
  const Grid g = grid_for(w);
  const EigenReport r = soliton_block_spectrum(g, p, w, 0, Parity::even_x, 3);
  CHECK_FALSE(r.near_continuum[0]);
  CHECK(r.eigenvalues[1] > w - r.continuum_band);
  CHECK(r.near_continuum[1]);
  // the zero eigenvalue of the even symmetric restriction lives only in n = 1
  for (int n = 0; n < g.n_modes; ++n) {
    const EigenReport rn = soliton_block_spectrum(g, p, w, n, Parity::even_x, 1);
    if (n == 1) {
      CHECK(std::fabs(rn.eigenvalues[0]) < 1e-6);
    } else {
      CHECK(std::fabs(rn.eigenvalues[0]) > 0.1);
    }
  }
  CHECK_THROWS_AS(lowest_eigenpairs(ModeOperator{g, 0, 1.0, Eigen::VectorXd::Zero(g.half())}, 0,
                                    Parity::even_x),
                  std::invalid_argument);
}
