#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "linesol/closed_form.hpp"
#include "linesol/field.hpp"
#include "linesol/operators.hpp"
#include "linesol/samples.hpp"

using namespace linesol;

namespace {

Grid default_grid(double p) { return Grid(30.0 / std::sqrt(omega_p(p)), 2049, 8); }

SymField random_field(const Grid& g, std::mt19937_64& rng, Parity par = Parity::even_x) {
  std::normal_distribution<double> nd;
  SymField u(g, par);
  for (int n = 0; n < g.n_modes; ++n)
    for (int j = 0; j < g.half(); ++j) u(n, j) = nd(rng);
  if (par == Parity::odd_x) u.coeffs().col(0).setZero();
  return u;
}

// Unfolded full-grid reference: -D_xx with zeros outside (-L, L).
Eigen::VectorXd full_grid_neg_dxx(const Grid& g, const Eigen::VectorXd& u) {
  const auto& c = g.stencil();
  const int m = static_cast<int>(c.size()) - 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
  for (int i = 0; i < u.size(); ++i) {
    double s = c[0] * u(i);
    for (int k = 1; k <= m; ++k) {
      if (i + k < u.size()) s += c[k] * u(i + k);
      if (i - k >= 0) s += c[k] * u(i - k);
    }
    out(i) = -s / (g.dx() * g.dx());
  }
  return out;
}

}  // namespace

TEST_CASE("second difference weights") {
  const auto c2 = second_difference_weights(2);
  CHECK(c2[0] == -2.0);
  CHECK(c2[1] == 1.0);
  const auto c4 = second_difference_weights(4);
  CHECK(c4[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(c4[2] == doctest::Approx(-1.0 / 12.0).epsilon(1e-15));
  CHECK(c4[0] == doctest::Approx(-2.5).epsilon(1e-15));
  for (int order : {2, 4, 6, 8, 10}) {
    const auto c = second_difference_weights(order);
    // exact on x² and annihilates x⁴ up to order 4
    double s2 = 0.0, s4 = 0.0;
    for (size_t k = 1; k < c.size(); ++k) {
      s2 += 2.0 * c[k] * double(k * k);
      s4 += 2.0 * c[k] * std::pow(double(k), 4);
    }
    CHECK(s2 == doctest::Approx(2.0).epsilon(1e-13));
    if (order >= 4) CHECK(std::fabs(s4) < 1e-12);
  }
  CHECK_THROWS_AS(second_difference_weights(3), std::invalid_argument);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Grid(10.0, 100, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-1.0, 101, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid(10.0, 101, 0), std::invalid_argument);
  const Grid g(10.0, 101, 4);
  CHECK(g.half() == 50);
  CHECK(g.dx() == doctest::Approx(0.2));
  double wsum = 0.0;
  for (int k = 0; k < g.n_colloc(); ++k) wsum += g.y_weight(k);
  CHECK(wsum == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("folded stencil matches the unfolded full grid") {
  std::mt19937_64 rng(7);
  for (int order : {4, 8}) {
    const Grid g(5.0, 41, 1, order);
    for (Parity par : {Parity::even_x, Parity::odd_x}) {
      const SymField u = random_field(g, rng, par);
      const Eigen::VectorXd full = u.full_coeffs().row(0).transpose();
      const Eigen::VectorXd ref = full_grid_neg_dxx(g, full);
      SymField out(g, par);
      apply_neg_dxx(g, u.coeffs().data(), out.coeffs().data(), par);
      const Eigen::VectorXd folded = out.full_coeffs().row(0).transpose();
      // boundary node i = 0, nx-1 is Dirichlet and not an unknown
      CHECK((folded - ref).segment(1, g.nx - 2).cwiseAbs().maxCoeff() <
            1e-12 * ref.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("mode operator symmetry") {
  const Grid g(8.0, 81, 2, 8);
  ModeOperator op;
  op.grid = g;
  op.n = 1;
  op.shift = 1.3;
  op.potential = Eigen::VectorXd::LinSpaced(g.half(), 2.0, 0.0);
  for (Parity par : {Parity::even_x, Parity::odd_x}) {
    const Eigen::MatrixXd A = Eigen::MatrixXd(op.matrix(par));
    const Eigen::MatrixXd WA = op.weights(par).asDiagonal() * A;
    CHECK((WA - WA.transpose()).cwiseAbs().maxCoeff() < 1e-12 * WA.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd B = Eigen::MatrixXd(op.symmetric_matrix(par));
    CHECK((B - B.transpose()).cwiseAbs().maxCoeff() < 1e-12 * B.cwiseAbs().maxCoeff());
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(op.size(par), -1.0, 3.0);
    CHECK((A * v - op.apply(v, par)).cwiseAbs().maxCoeff() < 1e-10);
  }
  // zero potential: positive definite with spectrum above the shift
  op.potential.setZero();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(op.symmetric_matrix(Parity::even_x)));
  CHECK(es.eigenvalues().minCoeff() >= op.shift);
}

TEST_CASE("apply_F annihilates the sampled soliton") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const Grid g = default_grid(p);
    for (double w : {0.9 * omega_p(p), omega_p(p), 1.2 * omega_p(p)}) {
      const SymField r = sample_soliton(g, p, w);
      const SymField f = apply_F(g, p, w, r);
      CHECK(f.parity() == Parity::even_x);
      CHECK(norm(f) < 1e-8 * norm(r));
    }
  }
  const Grid g = default_grid(3.0);
  CHECK(max_abs(apply_F(g, 3.0, 0.5, SymField::zero(g))) == 0.0);
  CHECK_THROWS_AS(apply_F(Grid(10.0, 101, 8), 3.0, 0.5, SymField::zero(g)), GridMismatch);
}

TEST_CASE("fourth-order stencil converges at rate 16") {
  const double p = 3.0, w = 1.0;
  std::vector<double> res;
  for (int nx : {301, 601, 1201}) {
    const Grid g(30.0, nx, 1, 4);
    const SymField r = sample_soliton(g, p, w);
    res.push_back(norm(apply_F(g, p, w, r)));
  }
  const double r1 = res[0] / res[1];
  const double r2 = res[1] / res[2];
  MESSAGE("convergence ratios " << r1 << " " << r2);
  CHECK(r1 == doctest::Approx(16.0).epsilon(0.1));
  CHECK(r2 == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("kernel-mode response is quadratic at the bifurcation point") {
  const double p = 3.0;
  const Grid g = default_grid(p);
  const double wp = omega_p(p);
  const SymField r = sample_soliton(g, p, wp);
  const SymField k = kernel_mode(g, p);
  std::vector<double> f;
  for (double d : {4e-2, 2e-2, 1e-2, 5e-3}) {
    f.push_back(norm(apply_F(g, p, wp, r + d * k)));
  }
  for (size_t i = 0; i + 1 < f.size(); ++i) {
    const double slope = std::log2(f[i] / f[i + 1]);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.02));
  }
}

TEST_CASE("linearized operators") {
  std::mt19937_64 rng(11);
  for (double p : {1.5, 3.0}) {
    const Grid g = default_grid(p);
    const double w = omega_p(p);
    const SymField r = sample_soliton(g, p, w);
    const auto lm = assemble_linearized(g, p, w, r, LinFactor::one_times);
    CHECK(norm(lm.apply(r)) < 1e-8 * norm(r));

    const auto lp = assemble_linearized(g, p, w, r, LinFactor::p_times);
    CHECK(lp.decoupled);
    const SymField v = random_field(g, rng), u = random_field(g, rng);
    const SymField Av = lp.apply(v), Au = lp.apply(u);
    CHECK(std::fabs(inner_product(Av, u) - inner_product(v, Au)) <
          1e-13 * norm(Av) * norm(u));

    // decoupling: a single-mode input stays single-mode
    SymField single = SymField::zero(g);
    single.coeffs().row(2) = v.coeffs().row(2);
    const SymField out = lp.apply(single);
    for (int n = 0; n < g.n_modes; ++n) {
      if (n != 2) CHECK(out.coeffs().row(n).cwiseAbs().maxCoeff() == 0.0);
    }

    // y-dependent base: coupled but still self-adjoint
    const SymField base = r + 0.05 * kernel_mode(g, p);
    const auto lc = assemble_linearized(g, p, w, base, LinFactor::p_times);
    CHECK_FALSE(lc.decoupled);
    const SymField Cv = lc.apply(v), Cu = lc.apply(u);
    CHECK(std::fabs(inner_product(Cv, u) - inner_product(v, Cu)) <
          1e-13 * norm(Cv) * norm(u));
    // sparse matrix agrees with the matrix-free application
    const Eigen::VectorXd mv = lc.matrix() * v.flatten();
    CHECK((mv - Cv.flatten()).cwiseAbs().maxCoeff() < 1e-9 * Cv.flatten().cwiseAbs().maxCoeff());
  }
  // fractional power of a sign-changing base is rejected
  const Grid g = default_grid(1.5);
  SymField bad = sample_soliton(g, 1.5, omega_p(1.5));
  bad(0, 10) = -1e-3;
  CHECK_THROWS_AS(assemble_linearized(g, 1.5, omega_p(1.5), bad, LinFactor::p_times),
                  PositivityError);
  // p ≥ 2 tolerates it
  const Grid g3 = default_grid(3.0);
  SymField bad3 = sample_soliton(g3, 3.0, omega_p(3.0));
  bad3(0, 10) = -1e-3;
  CHECK_NOTHROW(assemble_linearized(g3, 3.0, omega_p(3.0), bad3, LinFactor::p_times));
}

TEST_CASE("parity preservation") {
  std::mt19937_64 rng(5);
  const Grid g = default_grid(3.0);
  const SymField r = sample_soliton(g, 3.0, omega_p(3.0));
  const auto lp = assemble_linearized(g, 3.0, omega_p(3.0), r, LinFactor::p_times);
  const SymField odd = random_field(g, rng, Parity::odd_x);
  const SymField out = lp.apply(odd);
  CHECK(out.parity() == Parity::odd_x);
  CHECK(out.coeffs().col(0).cwiseAbs().maxCoeff() == 0.0);
  const SymField even = random_field(g, rng);
  CHECK(lp.apply(even).parity() == Parity::even_x);
  CHECK(apply_F(g, 3.0, 0.3, r).parity() == Parity::even_x);
  // storage mirrors exactly
  for (int i = 0; i < g.nx; ++i) {
    CHECK(even.full_value(3, i) == even.full_value(3, g.nx - 1 - i));
    CHECK(odd.full_value(3, i) == -odd.full_value(3, g.nx - 1 - i));
  }
}

TEST_CASE("inner product") {
  const double p = 3.0;
  const Grid g = default_grid(p);
  const SymField k = kernel_mode(g, p);
  const SymField r = sample_soliton(g, p, omega_p(p));
  CHECK(std::fabs(inner_product(k, k) - 1.0) < 1e-8);
  CHECK(inner_product(r, k) == 0.0);
  // ∫R² = 4√ω on ℝ, times 2π for the y-average of mode 0
  CHECK(inner_product(r, r) ==
        doctest::Approx(2.0 * std::numbers::pi * 4.0 / std::sqrt(3.0)).epsilon(1e-10));
  CHECK_THROWS_AS(inner_product(r, SymField::zero(Grid(10.0, 101, 8))), GridMismatch);
}

TEST_CASE("collocation transforms") {
  std::mt19937_64 rng(3);
  const Grid g(10.0, 101, 6);
  const SymField u = random_field(g, rng);
  const SymField back = from_physical(g, to_physical(u));
  CHECK((back.coeffs() - u.coeffs()).cwiseAbs().maxCoeff() < 1e-13);
  // cos y · cos y = 1/2 + cos(2y)/2
  const SymField c1 = SymField::sample(g, 1, [](double) { return 1.0; });
  const SymField sq = multiply(c1, c1);
  CHECK(sq(0, 3) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sq(2, 3) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::fabs(sq(1, 3)) < 1e-15);
  // y ↦ y + π reverses the collocation rows
  const Eigen::MatrixXd ph = to_physical(u);
  const Eigen::MatrixXd sh = to_physical(u.shift_half_period());
  CHECK((sh - ph.colwise().reverse()).cwiseAbs().maxCoeff() < 1e-13);
  // flatten round trip
  CHECK((SymField::unflatten(g, u.flatten()).coeffs() - u.coeffs()).cwiseAbs().maxCoeff() == 0.0);
}
