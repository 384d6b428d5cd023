// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "linesol/closed_form.hpp"
#include "linesol/continuation.hpp"
#include "linesol/operators.hpp"
#include "linesol/samples.hpp"

using namespace linesol;

namespace {

const LSContext& ctx3() {
  static const LSContext c(3.0, default_ls_grid(3.0));
  return c;
}

constexpr double kAmax = 0.2;

const Branch& branch3() {
  static const Branch b = trace_branch(ctx3(), kAmax, 16);
  return b;
}

// discrete H² size via ‖(-Δ + 1)u‖
double h2_norm(const SymField& u) { return norm(apply_linear_part(u, 1.0)); }

}  // namespace

TEST_CASE("trivial branch is returned unchanged") {
  const auto& c = ctx3();
  for (double w : {0.3, 0.4}) {
    const SymField R = sample_soliton(c.grid, 3.0, w);
    const BranchPoint bp = newton_full(c, 0.0, w, R);
    CHECK(bp.omega == w);
    CHECK(max_abs(bp.field - R) < 1e-8);
    CHECK(bp.residual < 1e-10);
    CHECK(bp.a == 0.0);
  }
}

TEST_CASE("small amplitude from the linear prediction") {
  const auto& c = ctx3();
  double prev_ratio = NAN;
  for (double a : {0.04, 0.02, 0.01}) {
    const BranchPoint bp = newton_full(c, a, c.wp, c.R + a * c.k);
    CHECK(bp.residual < 1e-10);
    CHECK(std::fabs(inner_product(bp.field, c.k) - a) < 1e-10);
    CHECK(bp.min_field > 0.0);
    const double ratio = h2_norm(bp.field - c.R - a * c.k) / (a * a);
    if (std::isfinite(prev_ratio)) CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.05));
    prev_ratio = ratio;
  }
}

TEST_CASE("trace_branch validates its arguments") {
  CHECK_THROWS_AS(trace_branch(ctx3(), kAmax, 4), std::invalid_argument);
  CHECK_THROWS_AS(trace_branch(ctx3(), -1.0, 16), std::invalid_argument);
}

TEST_CASE("branch invariants") {
  const auto& c = ctx3();
  const Branch& b = branch3();
  REQUIRE(b.points.size() == 33);
  for (size_t i = 0; i < b.points.size(); ++i) {
    const auto& pt = b.points[i];
    CHECK(pt.residual < 1e-10);
    CHECK(std::fabs(inner_product(pt.field, c.k) - pt.a) < 1e-10);
    CHECK(pt.min_field > 0.0);
    if (i > 0) CHECK(pt.a > b.points[i - 1].a);
  }
  const BranchFit f = fit_branch(c, b, kAmax);
  CHECK(f.evenness < 1e-9);
  CHECK(f.field_symmetry < 1e-9);
  CHECK(f.n_used == 8);
}

TEST_CASE("branch fits against the reduction") {
  const auto& c = ctx3();
  const BranchFit f = fit_branch(c, branch3(), kAmax);
  const PitchforkCoefficient pc = pitchfork_coefficient(c);
  CHECK(f.omega2_fit == doctest::Approx(pc.omega2_direct).epsilon(1e-2));
  const MassCoefficient mc = mass_expansion_coefficient(3.0, pc.omega2_direct);
  CHECK(f.mass2_fit == doctest::Approx(mc.mass2).epsilon(0.02));
  CHECK(f.mass0 == doctest::Approx(2.0 * std::numbers::pi * 4.0 / std::sqrt(3.0)).epsilon(1e-6));
  // the remainder beyond a² behaves like a⁴
  CHECK(f.mass_remainder_slope > 3.5);
}

TEST_CASE("restart from an interior point reproduces the branch") {
  const auto& c = ctx3();
  const Branch& b = branch3();
  const size_t mid = b.points.size() / 2;  // a = 0
  std::vector<BranchPoint> seed{b.points[mid + 3], b.points[mid + 4]};
  const auto rest = continue_branch(c, seed, kAmax, kAmax / 16);
  REQUIRE(rest.size() == b.points.size() - (mid + 3));
  for (size_t i = 2; i < rest.size(); ++i) {
    const auto& ref = b.points[mid + 3 + i];
    CHECK(rest[i].a == doctest::Approx(ref.a).epsilon(1e-14));
    CHECK(std::fabs(rest[i].omega - ref.omega) < 1e-8);
    CHECK(max_abs(rest[i].field - ref.field) < 1e-8);
  }
}

TEST_CASE("tracing is deterministic") {
  const Branch again = trace_branch(ctx3(), kAmax, 16);
  CHECK(branch_csv(again) == branch_csv(branch3()));
}

TEST_CASE("fixed-frequency zeros and the two curves") {
  const auto& c = ctx3();
  const Branch& b = branch3();

  // unperturbed start: trivial
  const double w_lo = 0.98 * c.wp;
  const BranchPoint z0 = newton_fixed_omega(c, w_lo, sample_soliton(c.grid, 3.0, w_lo));
  CHECK(std::fabs(z0.a) < 1e-8);

  // seeds along ±k above ω_p land on sign-related points of one pitchfork
  const double w_hi = b.points.back().omega * 0.5 + c.wp * 0.5;
  const SymField R = sample_soliton(c.grid, 3.0, w_hi);
  const double a_seed = 0.9 * kAmax / std::sqrt(2.0);
  const BranchPoint zp = newton_fixed_omega(c, w_hi, R + a_seed * c.k);
  const BranchPoint zm = newton_fixed_omega(c, w_hi, R - a_seed * c.k);
  CHECK(zp.a > 1e-3);
  CHECK(zm.a == doctest::Approx(-zp.a).epsilon(1e-9));
  CHECK(max_abs(zp.field - zm.field.shift_half_period()) < 1e-9);
  const BranchPoint q = branch_point_at(c, b, zp.a);
  CHECK(max_abs(q.field - zp.field) < 1e-6);

  // the reduced fallback reaches a zero on one of the two curves
  const BranchPoint zr = newton_fixed_omega_reduced(c, w_hi, R + 0.5 * a_seed * c.k, 0.05);
  CHECK(zr.residual < 1e-10);
  if (std::fabs(zr.a) < 1e-8) {
    CHECK(max_abs(zr.field - R) < 1e-6);
  } else {
    CHECK(std::fabs(zr.a) == doctest::Approx(zp.a).epsilon(1e-8));
  }
  CHECK_THROWS_AS(newton_fixed_omega_reduced(c, w_hi, R, 0.0), std::invalid_argument);

  const UniquenessReport rep = uniqueness_probe(c, b, 12, 1e-2, 7);
  CHECK(rep.unclassified == 0);
  CHECK(rep.trivial + rep.bifurcating + rep.not_converged == 12);
  const UniquenessReport rep2 = uniqueness_probe(c, b, 12, 1e-2, 7);
  CHECK(to_json(rep).dump() == to_json(rep2).dump());
}

TEST_CASE("decay rates") {
  const auto& c = ctx3();
  // trivial point at ω = 1
  const BranchPoint triv = newton_full(c, 0.0, 1.0, sample_soliton(c.grid, 3.0, 1.0));
  const auto d = verify_decay(c, triv, 0.05);
  REQUIRE(d.size() == 1);
  CHECK(d[0].status == DecayStatus::pass);
  CHECK(d[0].fitted == doctest::Approx(1.0).epsilon(0.05));

  const Branch& b = branch3();
  const size_t i = b.points.size() / 2 + 4;
  const auto dq = verify_decay(c, b.points[i], 0.05, &b.points[i - 1], &b.points[i + 1]);
  REQUIRE(dq.size() == 4);
  for (const auto& x : dq) {
    CAPTURE(x.quantity);
    CHECK(x.status == DecayStatus::pass);
  }
  CHECK(dq[1].fitted == doctest::Approx(2.0 * std::sqrt(c.wp)).epsilon(0.05));

  // a profile that vanishes in the window cannot be fitted
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(c.grid.half());
  CHECK(fit_decay(c.grid, zero, "zero", 1.0, 0.9, 1.1).status == DecayStatus::inconclusive);
}

TEST_CASE("branch CSV layout") {
  const std::string csv = branch_csv(branch3());
  CHECK(csv.rfind("a,omega,mass,residual,min_field,newton_iters\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 34);
}
