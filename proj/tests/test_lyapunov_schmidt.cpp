// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "linesol/closed_form.hpp"
#include "linesol/fd_oracle.hpp"
#include "linesol/lyapunov_schmidt.hpp"
#include "linesol/operators.hpp"
#include "linesol/samples.hpp"

using namespace linesol;

namespace {

const LSContext& ctx3() {
  static const LSContext c(3.0, default_ls_grid(3.0));
  return c;
}

SymField random_field(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SymField f(g);
  for (int n = 0; n < g.n_modes; ++n) {
    for (int j = 0; j < g.half(); ++j) f(n, j) = nd(rng) * std::exp(-0.05 * g.x(j));
  }
  return f;
}

// ‖a - b‖ relative to ‖a‖
double rel(const SymField& a, const SymField& b) {
  return norm(a - b) / std::max(norm(a), 1e-12);
}
double bundle_rel(std::initializer_list<double> a, std::initializer_list<double> b) {
  double num = 0.0, den = 0.0;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    num += (*ia - *ib) * (*ia - *ib);
    den += *ia * *ia;
  }
  return std::sqrt(num / std::max(den, 1e-6));
}

}  // namespace

TEST_CASE("projection removes the kernel mode and is idempotent") {
  const auto& c = ctx3();
  CHECK(norm(project_perp(c, c.k)) < 1e-12);
  const SymField R = sample_soliton(c.grid, 3.0, 0.5);
  CHECK(norm(project_perp(c, R) - R) < 1e-13 * norm(R));
  const SymField f = random_field(c.grid, 7);
  const SymField pf = project_perp(c, f);
  CHECK(norm(project_perp(c, pf) - pf) < 1e-13 * norm(f));
}

TEST_CASE("auxiliary solution on the trivial curve") {
  const auto& c = ctx3();
  const LSState s0 = solve_auxiliary(c, c.wp, 0.0);
  CHECK(s0.aux_residual < 1e-10);
  CHECK(norm(s0.eta) < 1e-10);
  for (double f : {0.8, 0.9, 1.1, 1.2}) {
    const double w = f * c.wp;
    const LSState s = solve_auxiliary(c, w, 0.0);
    const SymField expect = sample_soliton(c.grid, 3.0, w) - c.R;
    CHECK(norm(s.eta - expect) < 1e-8);
    CHECK(std::fabs(s.f_parallel) < 1e-11);
    CHECK(s.E_diag == s.f_parallel);
  }
}

TEST_CASE("state invariants off the trivial curve") {
  const auto& c = ctx3();
  for (double a : {0.05, -0.05}) {
    const LSState s = solve_auxiliary(c, 1.05 * c.wp, a);
    CHECK(s.aux_residual < 1e-10);
    CHECK(std::fabs(inner_product(s.eta, c.k)) < 1e-12);
    CHECK(std::fabs(inner_product(s.phi, c.k) - a) < 1e-10);
    CHECK(to_physical(s.phi).minCoeff() > 0.0);
  }
}

TEST_CASE("a-parity of the reduction") {
  const auto& c = ctx3();
  const double w = 1.02 * c.wp;
  const LSState sp = solve_auxiliary(c, w, 0.04);
  const LSState sm = solve_auxiliary(c, w, -0.04);
  CHECK(max_abs(sp.eta - sm.eta.shift_half_period()) < 1e-11);
  CHECK(std::fabs(sp.f_parallel + sm.f_parallel) < 1e-12);
}

TEST_CASE("constrained inverse") {
  const auto& c = ctx3();
  const LSState s = solve_auxiliary(c, c.wp, 0.0);
  const SymField dR = sample_soliton_domega(c.grid, 3.0, c.wp);
  CHECK(norm(solve_T(c, s, c.R) + dR) < 1e-8);

  const LinearizedOperator lp = assemble_linearized(c.grid, 3.0, c.wp, s.phi, LinFactor::p_times);
  const SymField b = random_field(c.grid, 11);
  const SymField x = solve_T(c, s, b);
  CHECK(std::fabs(inner_product(x, c.k)) < 1e-12 * norm(x));
  CHECK(norm(project_perp(c, lp.apply(x)) - project_perp(c, b)) < 1e-9 * norm(b));
}

TEST_CASE("self-adjointness and kernel annihilation at the bifurcation point") {
  const auto& c = ctx3();
  const LinearizedOperator lp = assemble_linearized(c.grid, 3.0, c.wp, c.R, LinFactor::p_times);
  for (unsigned seed : {1u, 2u, 3u}) {
    const SymField u = random_field(c.grid, seed);
    const double lhs = inner_product(lp.apply(u), c.k);
    const double rhs = inner_product(u, lp.apply(c.k));
    CHECK(std::fabs(lhs - rhs) < 1e-12 * norm(u) * std::max(1.0, norm(lp.apply(u))));
    CHECK(std::fabs(lhs) < 1e-9 * norm(u));
  }
}

TEST_CASE("first derivative fields at known points") {
  const auto& c = ctx3();
  const LSState s0 = solve_auxiliary(c, c.wp, 0.0);
  const DerivativeBundle d0 = phi_derivatives(c, s0, 1);
  CHECK(max_abs(d0.a - c.k) < 1e-9);
  for (double f : {0.9, 1.0, 1.15}) {
    const LSState s = solve_auxiliary(c, f * c.wp, 0.0);
    const DerivativeBundle d = phi_derivatives(c, s, 1);
    CHECK(max_abs(d.w - sample_soliton_domega(c.grid, 3.0, f * c.wp)) < 1e-8);
    const FparBundle fb = fpar_derivatives(c, s, d);
    CHECK(std::fabs(fb.w) < 1e-10);
  }
}

TEST_CASE("higher derivative fields lie in X2") {
  const auto& c = ctx3();
  const LSState s = solve_auxiliary(c, 1.05 * c.wp, 0.05);
  const DerivativeBundle d = phi_derivatives(c, s, 3);
  for (const SymField* f : {&d.aa, &d.aw, &d.ww, &d.aaa, &d.aaw, &d.aww, &d.www}) {
    CHECK(std::fabs(inner_product(*f, c.k)) < 1e-10 * std::max(1.0, norm(*f)));
  }
  CHECK(std::fabs(inner_product(d.a, c.k) - 1.0) < 1e-10);
  CHECK(std::fabs(inner_product(d.w, c.k)) < 1e-10);
}

TEST_CASE("analytic derivatives against finite differences") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const LSContext c(p, default_ls_grid(p));
    for (auto [wf, a] : {std::pair{1.0, 0.0}, std::pair{1.05, 0.05}}) {
      CAPTURE(p);
      CAPTURE(a);
      const LSState s = solve_auxiliary(c, wf * c.wp, a);
      const DerivativeBundle d = phi_derivatives(c, s, 3);
      const FparBundle fa = fpar_derivatives(c, s, d);
      FiniteDifferenceOracle fd(c, wf * c.wp, a);
      const DerivativeBundle o = fd.phi(3);
      const FparBundle fo = fd.fpar(3);

      CHECK(rel(d.a, o.a) < 1e-6);
      CHECK(rel(d.w, o.w) < 1e-6);
      CHECK(rel(d.aa, o.aa) < 1e-4);
      CHECK(rel(d.aw, o.aw) < 1e-4);
      CHECK(rel(d.ww, o.ww) < 1e-4);
      CHECK(rel(d.aaa, o.aaa) < 1e-3);
      CHECK(rel(d.aaw, o.aaw) < 1e-3);
      CHECK(rel(d.aww, o.aww) < 1e-3);
      CHECK(rel(d.www, o.www) < 1e-3);

      // F_∥ derivatives vanish individually at some points (e.g. ∂_a∂_ω²F_∥ at
      // p = 5, a = 0), so compare each order as a vector
      CHECK(bundle_rel({fa.a, fa.w}, {fo.a, fo.w}) < 1e-6);
      CHECK(bundle_rel({fa.aa, fa.aw, fa.ww}, {fo.aa, fo.aw, fo.ww}) < 1e-4);
      CHECK(bundle_rel({fa.aaa, fa.aaw, fa.aww, fa.www}, {fo.aaa, fo.aaw, fo.aww, fo.www}) < 1e-3);
    }
  }
}

TEST_CASE("reduced function at the bifurcation point") {
  const auto& c = ctx3();
  const GValue g = g_value_and_derivs(c, c.wp, 0.0);
  CHECK(std::fabs(g.g) < 1e-9);
  CHECK(std::fabs(g.dg_da) < 1e-6);
  CHECK(g.dg_dw == doctest::Approx(-3.0).epsilon(1e-4));

  // a ≠ 0 quotient form tends to the limit
  const GValue gs = g_value_and_derivs(c, c.wp, 1e-3);
  CHECK(std::fabs(gs.g) < 1e-6);
  CHECK(gs.dg_dw == doctest::Approx(-3.0).epsilon(1e-4));
}

TEST_CASE("pitchfork coefficient routes agree") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    CAPTURE(p);
    const LSContext c(p, default_ls_grid(p));
    const PitchforkCoefficient pc = pitchfork_coefficient(c);
    CHECK(pc.discrepancy < 1e-6);
    CHECK(pc.quartic == doctest::Approx(pc.quartic_closed_form).epsilon(1e-8));
    CHECK(pc.dg_dw == doctest::Approx(-1.0 / c.wp).epsilon(1e-4));
    CHECK(pc.omega2_direct > 0.0);
  }
}

TEST_CASE("mass expansion coefficient") {
  const MassCoefficient m3 = mass_expansion_coefficient(3.0, 0.15);
  CHECK(m3.factor == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m3.norm_R2 == doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(m3.constant_mass == doctest::Approx(2.0 * std::numbers::pi * 4.0 / std::sqrt(3.0)).epsilon(1e-13));
  CHECK(m3.constant_as_printed == doctest::Approx(7.2552).epsilon(1e-5));
  const MassCoefficient m5 = mass_expansion_coefficient(5.0, 0.12);
  CHECK(m5.factor == 0.0);
  CHECK(m5.mass2 == doctest::Approx(-8.0).epsilon(1e-14));
}
