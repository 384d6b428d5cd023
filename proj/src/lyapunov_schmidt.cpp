// SPDX-License-Identifier: Apache-2.0
#include "linesol/lyapunov_schmidt.hpp"

#include <cmath>
#include <numbers>

#include "linesol/closed_form.hpp"
#include "linesol/operators.hpp"
#include "linesol/samples.hpp"

namespace linesol {

Grid default_ls_grid(double p, int nx, int n_modes, int fd_order) {
  return Grid(30.0 / std::sqrt(0.8 * omega_p(p)), nx, n_modes, fd_order);
}

LSContext::LSContext(double p_, const Grid& g) : p(p_), wp(omega_p(p_)), grid(g) {
  R = sample_soliton(g, p, wp);
  k = kernel_mode(g, p);
  k *= 1.0 / norm(k);
  kw = flat_weights(g).cwiseProduct(k.flatten());
}

SymField project_perp(const LSContext& ctx, const SymField& f) {
  return f - inner_product(f, ctx.k) * ctx.k;
}

namespace {

std::shared_ptr<const BorderedSolver> factor_T(const LSContext& ctx, double omega,
                                               const SymField& phi) {
  const LinearizedOperator lp = assemble_linearized(ctx.grid, ctx.p, omega, phi, LinFactor::p_times);
  return std::make_shared<const BorderedSolver>(lp, ctx.k.flatten(), ctx.kw, 0.0);
}

SymField apply_Tinv(const LSContext& ctx, const BorderedSolver& T, const SymField& rhs) {
  const SymField b = project_perp(ctx, rhs);
  auto [x, mu] = T.solve(b.flatten(), 0.0);
  (void)mu;
  return SymField::unflatten(ctx.grid, x);
}

}  // namespace

LSState solve_auxiliary(const LSContext& ctx, double omega, double a,
                        const std::optional<SymField>& warm_start, const AuxOptions& opts) {
  const Grid& g = ctx.grid;
  SymField h = warm_start ? *warm_start : sample_soliton(g, ctx.p, omega) - ctx.R;
  if (h.grid() != g) throw GridMismatch("solve_auxiliary: warm start grid mismatch");
  h = project_perp(ctx, h);

  LSState st;
  st.omega = omega;
  st.a = a;
  int growth = 0;
  int polish = -1;  // < 0 until tol is met
  SymField best_h = h;
  double best_res = INFINITY;
  for (int it = 0;; ++it) {
    const SymField phi = ctx.R + a * ctx.k + h;
    const SymField G = project_perp(ctx, apply_F(g, ctx.p, omega, phi));
    const double res = norm(G);
    st.history.push_back(res);
    if (!std::isfinite(res)) {
      throw NewtonDivergence("solve_auxiliary: non-finite residual", st.history);
    }
    if (res < best_res) {
      best_res = res;
      best_h = h;
    }
    if (st.history.size() >= 2 && res > st.history[st.history.size() - 2]) {
      ++growth;
    } else {
      growth = 0;
    }
    if (polish >= 0) {
      // stop polishing once a step no longer halves the residual
      const double prev = st.history[st.history.size() - 2];
      if (res > 0.5 * prev || polish >= opts.polish_steps) break;
      ++polish;
    } else if (res < opts.tol) {
      polish = 0;
      if (res == 0.0 || opts.polish_steps == 0) break;
    }
    if (polish < 0) {
      if (growth >= opts.max_growth) {
        throw NewtonDivergence("solve_auxiliary: residual grew on consecutive steps", st.history);
      }
      if (it >= opts.max_iter) {
        throw NewtonDivergence("solve_auxiliary: iteration cap reached", st.history);
      }
    }
    const auto T = factor_T(ctx, omega, phi);
    auto [dx, mu] = T->solve(-G.flatten(), 0.0);
    (void)mu;
    h += SymField::unflatten(g, dx);
    st.iterations = it + 1;
  }
  st.eta = best_h;
  st.phi = ctx.R + a * ctx.k + best_h;
  st.aux_residual = best_res;
  st.T = factor_T(ctx, omega, st.phi);
  st.f_parallel = f_parallel(ctx, st);
  st.E_diag = st.f_parallel;
  return st;
}

SymField solve_T(const LSContext& ctx, const LSState& state, const SymField& rhs) {
  if (!state.T) throw SingularSystem("solve_T: state carries no factorization");
  if (rhs.grid() != ctx.grid) throw GridMismatch("solve_T: rhs grid mismatch");
  return apply_Tinv(ctx, *state.T, rhs);
}

double f_parallel(const LSContext& ctx, const LSState& state) {
  return inner_product(apply_F(ctx.grid, ctx.p, state.omega, state.phi), ctx.k);
}

Eigen::MatrixXd potential_V(const LSContext& ctx, const SymField& phi, int order) {
  Eigen::MatrixXd ph = to_physical(phi);
  for (Eigen::Index j = 0; j < ph.cols(); ++j) {
    for (Eigen::Index kk = 0; kk < ph.rows(); ++kk) {
      ph(kk, j) = power_nl_derivative(ph(kk, j), ctx.p, order);
    }
  }
  return ph;
}

namespace {

struct PhysCache {
  const LSContext& ctx;
  SymField back(const Eigen::MatrixXd& m) const { return from_physical(ctx.grid, m); }
};

void require_positive(const LSContext& ctx, const SymField& phi, int order) {
  if (ctx.p >= order) return;
  if (to_physical(phi).minCoeff() <= 0.0) {
    throw PositivityError("phi_derivatives: φ must be positive where V_" + std::to_string(order) +
                          " carries a negative power");
  }
}

}  // namespace

DerivativeBundle phi_derivatives(const LSContext& ctx, const LSState& state, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("phi_derivatives: order must be 1..3");
  if (!state.T) throw SingularSystem("phi_derivatives: state carries no factorization");
  const BorderedSolver& T = *state.T;
  const PhysCache pc{ctx};
  DerivativeBundle d;
  d.order = order;
  const LinearizedOperator lp =
      assemble_linearized(ctx.grid, ctx.p, state.omega, state.phi, LinFactor::p_times);
  d.a = ctx.k - apply_Tinv(ctx, T, lp.apply(ctx.k));
  d.w = -1.0 * apply_Tinv(ctx, T, state.phi);
  if (order == 1) return d;

  require_positive(ctx, state.phi, 2);
  const Eigen::MatrixXd V2 = potential_V(ctx, state.phi, 2);
  const Eigen::MatrixXd A = to_physical(d.a);
  const Eigen::MatrixXd W = to_physical(d.w);
  d.aa = apply_Tinv(ctx, T, pc.back(V2.cwiseProduct(A).cwiseProduct(A)));
  d.aw = apply_Tinv(ctx, T, pc.back(V2.cwiseProduct(A).cwiseProduct(W)) - d.a);
  d.ww = apply_Tinv(ctx, T, pc.back(V2.cwiseProduct(W).cwiseProduct(W)) - 2.0 * d.w);
  if (order == 2) return d;

  require_positive(ctx, state.phi, 3);
  const Eigen::MatrixXd V3 = potential_V(ctx, state.phi, 3);
  const Eigen::MatrixXd AA = to_physical(d.aa);
  const Eigen::MatrixXd AW = to_physical(d.aw);
  const Eigen::MatrixXd WW = to_physical(d.ww);
  const Eigen::ArrayXXd a = A.array(), w = W.array(), v2 = V2.array(), v3 = V3.array();
  d.aaa = apply_Tinv(ctx, T, pc.back((v3 * a * a * a + 3.0 * v2 * a * AA.array()).matrix()));
  d.aaw = apply_Tinv(
      ctx, T,
      pc.back((v3 * a * a * w + v2 * (AA.array() * w + 2.0 * a * AW.array())).matrix()) - d.aa);
  d.aww = apply_Tinv(
      ctx, T,
      pc.back((v3 * a * w * w + v2 * (WW.array() * a + 2.0 * w * AW.array())).matrix()) -
          2.0 * d.aw);
  d.www = apply_Tinv(ctx, T, pc.back((v3 * w * w * w + 3.0 * v2 * w * WW.array()).matrix()) -
                                 3.0 * d.ww);
  return d;
}

FparBundle fpar_derivatives(const LSContext& ctx, const LSState& state, const DerivativeBundle& d) {
  const PhysCache pc{ctx};
  const SymField& k = ctx.k;
  const LinearizedOperator lp =
      assemble_linearized(ctx.grid, ctx.p, state.omega, state.phi, LinFactor::p_times);
  FparBundle f;
  f.order = d.order;
  f.a = inner_product(lp.apply(d.a), k);
  f.w = inner_product(lp.apply(d.w), k) + state.a;
  if (d.order == 1) return f;

  const Eigen::ArrayXXd v2 = potential_V(ctx, state.phi, 2).array();
  const Eigen::ArrayXXd A = to_physical(d.a).array();
  const Eigen::ArrayXXd W = to_physical(d.w).array();
  f.aa = inner_product(lp.apply(d.aa) - pc.back((v2 * A * A).matrix()), k);
  f.aw = 1.0 + inner_product(lp.apply(d.aw) - pc.back((v2 * A * W).matrix()), k);
  f.ww = inner_product(lp.apply(d.ww) - pc.back((v2 * W * W).matrix()), k);
  if (d.order == 2) return f;

  const Eigen::ArrayXXd v3 = potential_V(ctx, state.phi, 3).array();
  const Eigen::ArrayXXd AA = to_physical(d.aa).array();
  const Eigen::ArrayXXd AW = to_physical(d.aw).array();
  const Eigen::ArrayXXd WW = to_physical(d.ww).array();
  f.aaa = inner_product(lp.apply(d.aaa) - pc.back((3.0 * v2 * A * AA + v3 * A * A * A).matrix()), k);
  f.aaw = inner_product(
      lp.apply(d.aaw) - pc.back((v2 * W * AA + 2.0 * v2 * A * AW + v3 * A * A * W).matrix()), k);
  f.aww = inner_product(
      lp.apply(d.aww) - pc.back((v2 * A * WW + 2.0 * v2 * W * AW + v3 * W * W * A).matrix()), k);
  f.www = inner_product(lp.apply(d.www) - pc.back((3.0 * v2 * W * WW + v3 * W * W * W).matrix()), k);
  return f;
}

GValue g_value_and_derivs(const LSContext& ctx, double omega, double a,
                          const std::optional<SymField>& warm_start) {
  const LSState st = solve_auxiliary(ctx, omega, a, warm_start);
  GValue out;
  if (a == 0.0) {
    const DerivativeBundle d = phi_derivatives(ctx, st, 3);
    const FparBundle f = fpar_derivatives(ctx, st, d);
    out.g = f.a;
    out.dg_da = 0.5 * f.aa;
    out.dg_dw = f.aw;
    out.d2g_da2 = f.aaa / 3.0;
    return out;
  }
  const DerivativeBundle d = phi_derivatives(ctx, st, 1);
  const FparBundle f = fpar_derivatives(ctx, st, d);
  out.g = st.f_parallel / a;
  out.dg_da = (a * f.a - st.f_parallel) / (a * a);
  out.dg_dw = f.w / a;
  return out;
}

PitchforkCoefficient pitchfork_coefficient(const LSContext& ctx) {
  const double p = ctx.p, wp = ctx.wp;
  const LSState st = solve_auxiliary(ctx, wp, 0.0);
  PitchforkCoefficient pc;
  pc.p = p;
  pc.wp = wp;

  // direct route
  const Eigen::MatrixXd R = to_physical(st.phi);
  const Eigen::MatrixXd K = to_physical(ctx.k);
  Eigen::MatrixXd Rm2 = R, Rm3 = R;
  for (Eigen::Index j = 0; j < R.cols(); ++j) {
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
      const double r = R(i, j);
      if (p < 3.0 && std::fabs(r) < kPowerFloor) pc.floor_active = true;
      Rm2(i, j) = (p < 2.0 && std::fabs(r) < kPowerFloor) ? 0.0 : std::pow(std::fabs(r), p - 2.0);
      Rm3(i, j) = (p < 3.0 && std::fabs(r) < kPowerFloor) ? 0.0 : std::pow(std::fabs(r), p - 3.0);
    }
  }
  const Eigen::ArrayXXd k2 = K.array() * K.array();
  const SymField h = from_physical(ctx.grid, (Rm2.array() * k2).matrix());
  pc.t_inv_hh = inner_product(solve_T(ctx, st, h), h);
  const SymField q = from_physical(ctx.grid, (Rm3.array() * k2 * k2).matrix());
  double s = 0.0;
  for (int j = 0; j < ctx.grid.half(); ++j) s += ctx.grid.quad_weight(j) * q(0, j);
  pc.quartic = ctx.grid.mode_weight(0) * s;
  const SolitonParams sp(p, wp);
  const double c = psi_normalization(sp);
  pc.quartic_closed_form =
      0.75 * std::numbers::pi * std::pow(c, 4) * soliton_power_integral(sp, 3.0 * p - 1.0);
  const double pp1 = p * (p - 1.0);
  pc.omega2_direct = -wp * pp1 * pp1 * pc.t_inv_hh - pp1 * (p - 2.0) * (wp / 3.0) * pc.quartic;

  // route through the third a-derivative of F_∥
  const DerivativeBundle d = phi_derivatives(ctx, st, 3);
  const FparBundle f = fpar_derivatives(ctx, st, d);
  pc.d3F = f.aaa;
  pc.dg_dw = f.aw;
  pc.omega2_via_d3F = (wp / 3.0) * f.aaa;

  pc.discrepancy = std::fabs(pc.omega2_direct - pc.omega2_via_d3F) /
                   std::max(std::fabs(pc.omega2_direct), std::fabs(pc.omega2_via_d3F));
  pc.omega2_direct_flipped = -pc.omega2_direct;
  pc.omega2_via_d3F_flipped = -pc.omega2_via_d3F;
  return pc;
}

MassCoefficient mass_expansion_coefficient(double p, double omega2) {
  const double wp = omega_p(p);
  const SolitonParams sp(p, wp);
  MassCoefficient mc;
  mc.factor = (5.0 - p) / (4.0 * (p - 1.0));
  mc.norm_R2 = soliton_power_integral(sp, 2.0);
  const double two_pi = 2.0 * std::numbers::pi;
  mc.mass2 = (two_pi * omega2 * mc.factor * mc.norm_R2 - 1.0) / wp;
  mc.constant_mass = two_pi * mc.norm_R2;
  mc.mass2_as_printed = (omega2 * mc.factor * mc.norm_R2 - 1.0) / wp;
  mc.constant_as_printed = std::numbers::pi * mc.norm_R2;
  return mc;
}

nlohmann::json to_json(const PitchforkCoefficient& pc, const MassCoefficient& mc) {
  nlohmann::json j;
  j["p"] = pc.p;
  j["omega_p"] = pc.wp;
  j["omega2_direct"] = pc.omega2_direct;
  j["omega2_via_d3F"] = pc.omega2_via_d3F;
  j["omega2_discrepancy"] = pc.discrepancy;
  j["omega2_direct_flipped_sign"] = pc.omega2_direct_flipped;
  j["omega2_via_d3F_flipped_sign"] = pc.omega2_via_d3F_flipped;
  j["d3F_parallel"] = pc.d3F;
  j["dg_domega"] = pc.dg_dw;
  j["t_inv_hh"] = pc.t_inv_hh;
  j["quartic"] = pc.quartic;
  j["quartic_closed_form"] = pc.quartic_closed_form;
  j["floor_active"] = pc.floor_active;
  j["mass2"] = mc.mass2;
  j["constant_mass"] = mc.constant_mass;
  j["mass2_as_printed"] = mc.mass2_as_printed;
  j["constant_as_printed"] = mc.constant_as_printed;
  j["mass_factor"] = mc.factor;
  j["norm_R_sq"] = mc.norm_R2;
  return j;
}

}  // namespace linesol
