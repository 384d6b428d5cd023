// SPDX-License-Identifier: Apache-2.0
#include "linesol/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "linesol/closed_form.hpp"
#include "linesol/operators.hpp"
#include "linesol/samples.hpp"

namespace linesol {

namespace {

constexpr double kConstraintTol = 1e-12;

void finish_point(BranchPoint& bp) {
  bp.mass = inner_product(bp.field, bp.field);
  bp.min_field = to_physical(bp.field).minCoeff();
}

// Newton bookkeeping shared by the three solvers: tracks the best iterate,
// detects growth, and stops polishing once a step no longer halves ‖F‖.
struct NewtonMonitor {
  const FullNewtonOptions& opts;
  std::vector<double> history;
  int growth = 0;
  int polish = -1;

  // true when iteration should stop
  bool update(double res, bool constraint_ok, const char* who) {
    history.push_back(res);
    if (!std::isfinite(res)) throw NewtonDivergence(std::string(who) + ": non-finite residual", history);
    const size_t n = history.size();
    growth = (n >= 2 && res > history[n - 2]) ? growth + 1 : 0;
    if (polish >= 0) {
      if (res > 0.5 * history[n - 2] || polish >= opts.polish_steps) return true;
      ++polish;
      return false;
    }
    if (res < opts.tol && constraint_ok) {
      polish = 0;
      return res == 0.0 || opts.polish_steps == 0;
    }
    if (growth >= opts.max_growth) {
      throw NewtonDivergence(std::string(who) + ": residual grew on consecutive steps", history);
    }
    if (static_cast<int>(n) > opts.max_iter) {
      throw NewtonDivergence(std::string(who) + ": iteration cap reached", history);
    }
    return false;
  }
};

BandLU factor_plain(const LinearizedOperator& A) {
  const auto t = A.triplets();
  int bw = 0;
  for (const auto& e : t) bw = std::max(bw, std::abs(e.row() - e.col()));
  return BandLU(A.grid.n_modes * A.grid.half(), bw, t);
}

BranchPoint trivial_newton(const LSContext& ctx, double omega, const SymField& u0,
                           const FullNewtonOptions& opts) {
  const Grid& g = ctx.grid;
  SymField u = SymField::zero(g);
  u.coeffs().row(0) = u0.coeffs().row(0);
  NewtonMonitor mon{opts, {}};
  SymField best = u;
  double best_res = INFINITY;
  int iters = 0;
  for (;;) {
    const SymField F = apply_F(g, ctx.p, omega, u);
    const double res = norm(F);
    if (res < best_res) {
      best_res = res;
      best = u;
    }
    if (mon.update(res, true, "newton_full(a = 0)")) break;
    const ModeOperator blk = assemble_linearized(g, ctx.p, omega, u, LinFactor::p_times).block(0);
    const Eigen::SparseMatrix<double> A = blk.matrix(Parity::even_x);
    std::vector<Eigen::Triplet<double>> t;
    for (int c = 0; c < A.outerSize(); ++c) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) {
        t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      }
    }
    const BandLU lu(g.half(), g.fd_order / 2, t);
    const Eigen::VectorXd d = lu.solve_refined(-F.coeffs().row(0).transpose());
    u.coeffs().row(0) += d.transpose();
    ++iters;
  }
  BranchPoint bp;
  bp.a = 0.0;
  bp.omega = omega;
  bp.field = best;
  bp.residual = best_res;
  bp.newton_iters = iters;
  bp.history = mon.history;
  finish_point(bp);
  return bp;
}

}  // namespace

BranchPoint newton_full(const LSContext& ctx, double a, double omega0, const SymField& u0,
                        const FullNewtonOptions& opts) {
  const Grid& g = ctx.grid;
  if (u0.grid() != g) throw GridMismatch("newton_full: initial field grid mismatch");
  if (a == 0.0) return trivial_newton(ctx, omega0, u0, opts);

  SymField u = u0;
  double omega = omega0;
  NewtonMonitor mon{opts, {}};
  SymField best = u;
  double best_omega = omega, best_res = INFINITY;
  int iters = 0;
  for (;;) {
    const SymField F = apply_F(g, ctx.p, omega, u);
    const double res = norm(F);
    const double con = inner_product(u, ctx.k) - a;
    const bool con_ok = std::fabs(con) < kConstraintTol;
    if (res < best_res && con_ok) {
      best_res = res;
      best = u;
      best_omega = omega;
    }
    if (mon.update(res, con_ok, "newton_full")) break;
    LinearizedOperator A;
    try {
      A = assemble_linearized(g, ctx.p, omega, u, LinFactor::p_times);
    } catch (const PositivityError& e) {
      throw NewtonDivergence(std::string("newton_full: ") + e.what(), mon.history);
    }
    const BorderedSolver J(A, u.flatten(), ctx.kw, 0.0);
    auto [du, dw] = J.solve(-F.flatten(), -con);
    u += SymField::unflatten(g, du);
    omega += dw;
    ++iters;
  }
  BranchPoint bp;
  bp.a = a;
  bp.omega = best_omega;
  bp.field = best;
  bp.residual = best_res;
  bp.newton_iters = iters;
  bp.history = mon.history;
  finish_point(bp);
  return bp;
}

namespace {

// Damped Newton for F(ω, u) = target (target = 0 when null).
BranchPoint fixed_omega_newton(const LSContext& ctx, double omega, const SymField& u0,
                               const FullNewtonOptions& opts, const SymField* target) {
  const Grid& g = ctx.grid;
  if (u0.grid() != g) throw GridMismatch("newton_fixed_omega: initial field grid mismatch");
  auto residual = [&](const SymField& v) {
    return target ? apply_F(g, ctx.p, omega, v) - *target : apply_F(g, ctx.p, omega, v);
  };
  SymField u = u0;
  NewtonMonitor mon{opts, {}};
  SymField best = u;
  double best_res = INFINITY;
  int iters = 0;
  SymField F = residual(u);
  double res = norm(F);
  for (;;) {
    if (res < best_res) {
      best_res = res;
      best = u;
    }
    if (mon.update(res, true, "newton_fixed_omega")) break;
    LinearizedOperator A;
    try {
      A = assemble_linearized(g, ctx.p, omega, u, LinFactor::p_times);
    } catch (const PositivityError& e) {
      throw NewtonDivergence(std::string("newton_fixed_omega: ") + e.what(), mon.history);
    }
    const SymField du = SymField::unflatten(g, factor_plain(A).solve_refined(-F.flatten()));
    // backtracking: accept the first step length that reduces ‖F‖
    double t = 1.0;
    for (;;) {
      const SymField trial = u + t * du;
      SymField Ft;
      bool ok = true;
      try {
        Ft = residual(trial);
      } catch (const PositivityError&) {
        ok = false;
      }
      const double rt = ok ? norm(Ft) : INFINITY;
      if ((rt < res || mon.polish >= 0) && std::isfinite(rt)) {
        u = trial;
        F = Ft;
        res = rt;
        break;
      }
      t *= 0.5;
      if (t < 1.0 / 1024) {
        if (mon.polish >= 0) break;
        throw NewtonDivergence("newton_fixed_omega: line search failed", mon.history);
      }
    }
    if (mon.polish >= 0 && t < 1.0) break;
    ++iters;
  }
  BranchPoint bp;
  bp.a = inner_product(best, ctx.k);
  bp.omega = omega;
  bp.field = best;
  bp.residual = best_res;
  bp.newton_iters = iters;
  bp.history = mon.history;
  finish_point(bp);
  return bp;
}

}  // namespace

BranchPoint newton_fixed_omega(const LSContext& ctx, double omega, const SymField& u0,
                               const FullNewtonOptions& opts) {
  return fixed_omega_newton(ctx, omega, u0, opts, nullptr);
}

namespace {

// F(ω, u) = μ k with ⟨u, k⟩ = a, Newton in (u, μ) from u0 shifted onto the
// constraint. The bordered Jacobian stays regular near the kernel direction.
std::pair<SymField, double> solve_at_amplitude(const LSContext& ctx, double omega, double a,
                                               const SymField& u0, const FullNewtonOptions& opts) {
  const Grid& g = ctx.grid;
  SymField u = u0 + (a - inner_product(u0, ctx.k)) * ctx.k;
  const Eigen::VectorXd kf = ctx.k.flatten();
  double mu = inner_product(apply_F(g, ctx.p, omega, u), ctx.k);
  NewtonMonitor mon{opts, {}};
  for (;;) {
    const SymField F = apply_F(g, ctx.p, omega, u) - mu * ctx.k;
    const double con = inner_product(u, ctx.k) - a;
    if (mon.update(norm(F), std::fabs(con) < kConstraintTol, "solve_at_amplitude")) break;
    LinearizedOperator A;
    try {
      A = assemble_linearized(g, ctx.p, omega, u, LinFactor::p_times);
    } catch (const PositivityError& e) {
      throw NewtonDivergence(std::string("solve_at_amplitude: ") + e.what(), mon.history);
    }
    const BorderedSolver J(A, -kf, ctx.kw, 0.0);
    auto [du, dmu] = J.solve(-F.flatten(), -con);
    u += SymField::unflatten(g, du);
    mu += dmu;
  }
  return {u, mu};
}

}  // namespace

BranchPoint newton_fixed_omega_reduced(const LSContext& ctx, double omega, const SymField& u0,
                                       double max_da, const FullNewtonOptions& opts) {
  if (!(max_da > 0)) throw std::invalid_argument("newton_fixed_omega_reduced: max_da must be positive");
  FullNewtonOptions inner = opts;
  inner.polish_steps = 1;
  double a0 = inner_product(u0, ctx.k);
  auto [u, mu0] = solve_at_amplitude(ctx, omega, a0, u0, inner);
  double a1 = a0 + (a0 >= 0 ? -0.1 : 0.1) * max_da;
  auto [u1, mu1] = solve_at_amplitude(ctx, omega, a1, u, inner);
  std::vector<double> history{std::fabs(mu0), std::fabs(mu1)};
  // secant on the scalar μ(a), each solve continued from the last
  for (int it = 0; it < opts.max_iter && std::fabs(mu1) > opts.tol; ++it) {
    if (mu1 == mu0) throw NewtonDivergence("newton_fixed_omega_reduced: flat reduced residual", history);
    const double step = std::clamp(-mu1 * (a1 - a0) / (mu1 - mu0), -max_da, max_da);
    a0 = a1;
    mu0 = mu1;
    a1 += step;
    std::tie(u1, mu1) = solve_at_amplitude(ctx, omega, a1, u1, inner);
    history.push_back(std::fabs(mu1));
  }
  if (std::fabs(mu1) > opts.tol) {
    throw NewtonDivergence("newton_fixed_omega_reduced: iteration cap reached", history);
  }
  return newton_fixed_omega(ctx, omega, u1, opts);
}

std::vector<BranchPoint> continue_branch(const LSContext& ctx, std::vector<BranchPoint> seed,
                                         double a_end, double da, const TraceOptions& opts) {
  if (seed.empty()) throw std::invalid_argument("continue_branch: empty seed");
  const double dir = a_end >= seed.back().a ? 1.0 : -1.0;
  da = dir * std::fabs(da);
  const double da_min = std::fabs(da) / std::pow(2.0, opts.min_halvings);
  std::vector<BranchPoint> out = std::move(seed);
  double step = da;
  while (dir * (a_end - out.back().a) > 1e-14) {
    const BranchPoint& last = out.back();
    double target = last.a + step;
    if (dir * (target - a_end) > 0.0) target = a_end;
    // secant predictor through the last two points, or the kernel direction
    SymField u_pred = last.field;
    double w_pred = last.omega;
    if (out.size() >= 2) {
      const BranchPoint& prev = out[out.size() - 2];
      const double s = (target - last.a) / (last.a - prev.a);
      u_pred = last.field + s * (last.field - prev.field);
      w_pred = last.omega + s * (last.omega - prev.omega);
    } else {
      u_pred = last.field + (target - last.a) * ctx.k;
    }
    try {
      BranchPoint bp = newton_full(ctx, target, w_pred, u_pred, opts.newton);
      out.push_back(std::move(bp));
      if (std::fabs(step) < std::fabs(da)) step *= 2.0;  // recover the nominal step
      if (std::fabs(step) > std::fabs(da)) step = da;
    } catch (const NewtonDivergence&) {
      step *= 0.5;
      if (std::fabs(step) < da_min) throw;
    } catch (const SingularSystem&) {
      step *= 0.5;
      if (std::fabs(step) < da_min) throw;
    }
  }
  return out;
}

Branch trace_branch(const LSContext& ctx, double a_max, int steps, const TraceOptions& opts) {
  if (steps < 8) throw std::invalid_argument("trace_branch: steps must be at least 8");
  if (!(a_max > 0.0)) throw std::invalid_argument("trace_branch: a_max must be positive");
  const BranchPoint origin = newton_full(ctx, 0.0, ctx.wp, ctx.R, opts.newton);
  const double da = a_max / steps;
  std::vector<BranchPoint> plus = continue_branch(ctx, {origin}, a_max, da, opts);
  std::vector<BranchPoint> minus = continue_branch(ctx, {origin}, -a_max, da, opts);
  Branch b;
  b.kind = BranchKind::bifurcating;
  for (auto it = minus.rbegin(); it != minus.rend(); ++it) b.points.push_back(*it);
  for (size_t i = 1; i < plus.size(); ++i) b.points.push_back(plus[i]);
  return b;
}

double choose_a_max(const LSContext& ctx, double upper) {
  for (double a = upper; a > upper / 64; a *= 0.5) {
    try {
      const BranchPoint bp = newton_full(ctx, a, ctx.wp, ctx.R + a * ctx.k);
      if (bp.newton_iters <= 8 && bp.min_field > 0.0) return a;
    } catch (const NewtonDivergence&) {
    } catch (const SingularSystem&) {
    }
  }
  return upper / 64;
}

BranchFit fit_branch(const LSContext& ctx, const Branch& b, double a_max, double window) {
  if (!(window > 0.0 && window <= 1.0)) throw std::invalid_argument("fit_branch: window must lie in (0, 1]");
  BranchFit f;
  f.min_field = INFINITY;
  const BranchPoint* origin = nullptr;
  for (const auto& pt : b.points) {
    if (pt.a == 0.0) origin = &pt;
    f.min_field = std::min(f.min_field, pt.min_field);
    f.max_residual = std::max(f.max_residual, pt.residual);
    f.max_constraint = std::max(f.max_constraint, std::fabs(inner_product(pt.field, ctx.k) - pt.a));
  }
  if (!origin) throw std::invalid_argument("fit_branch: branch has no a = 0 point");
  f.mass0 = origin->mass;

  // even models through the origin: y = c a²
  double s44 = 0, sw = 0, sm = 0;
  for (const auto& pt : b.points) {
    if (pt.a == 0.0 || std::fabs(pt.a) > a_max * window * (1 + 1e-12)) continue;
    const double a2 = pt.a * pt.a;
    s44 += a2 * a2;
    sw += a2 * (pt.omega - origin->omega);
    sm += a2 * (pt.mass - f.mass0);
    ++f.n_used;
  }
  if (f.n_used == 0) throw std::invalid_argument("fit_branch: no points inside the fit window");
  const double c = sw / s44;
  f.omega2_fit = 2.0 * c;
  f.mass2_fit = sm / s44;
  double rss = 0;
  for (const auto& pt : b.points) {
    if (pt.a == 0.0 || std::fabs(pt.a) > a_max * window * (1 + 1e-12)) continue;
    const double r = pt.omega - origin->omega - c * pt.a * pt.a;
    rss += r * r;
  }
  f.omega2_rms = std::sqrt(rss / f.n_used);

  // remainder exponent over the outer half of the branch
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& pt : b.points) {
    if (std::fabs(pt.a) < a_max / 2) continue;
    const double r = std::fabs(pt.mass - f.mass0 - f.mass2_fit * pt.a * pt.a);
    if (!(r > 0.0)) continue;
    const double x = std::log(std::fabs(pt.a)), y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  f.mass_remainder_slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : NAN;

  // a ↦ -a symmetry, pairing points by amplitude
  for (const auto& pt : b.points) {
    if (pt.a <= 0.0) continue;
    for (const auto& q : b.points) {
      if (std::fabs(q.a + pt.a) > 1e-14 * std::max(1.0, std::fabs(pt.a))) continue;
      f.evenness = std::max(f.evenness, std::fabs(pt.omega - q.omega));
      f.field_symmetry = std::max(f.field_symmetry, max_abs(pt.field - q.field.shift_half_period()));
    }
  }
  return f;
}

BranchPoint branch_point_at(const LSContext& ctx, const Branch& b, double a) {
  const auto& pts = b.points;
  if (pts.size() < 2) throw std::invalid_argument("branch_point_at: branch too short");
  size_t i = 0;
  while (i + 2 < pts.size() && pts[i + 1].a < a) ++i;
  const BranchPoint& p0 = pts[i];
  const BranchPoint& p1 = pts[i + 1];
  const double s = (a - p0.a) / (p1.a - p0.a);
  const SymField u = p0.field + s * (p1.field - p0.field);
  const double w = p0.omega + s * (p1.omega - p0.omega);
  return newton_full(ctx, a, w, u);
}

std::string to_string(ZeroClass c) {
  switch (c) {
    case ZeroClass::trivial: return "trivial";
    case ZeroClass::bifurcating: return "bifurcating";
    case ZeroClass::unclassified: return "unclassified";
    case ZeroClass::not_converged: return "not_converged";
  }
  return "?";
}

UniquenessReport uniqueness_probe(const LSContext& ctx, const Branch& b, int n_trials,
                                  double scale, std::uint64_t seed) {
  UniquenessReport rep;
  rep.n_trials = n_trials;
  rep.scale = scale;
  rep.seed = seed;
  if (b.points.empty()) throw std::invalid_argument("uniqueness_probe: empty branch");
  const double a_span = std::min(std::fabs(b.points.front().a), std::fabs(b.points.back().a));
  const double w_top = std::min(b.points.front().omega, b.points.back().omega);
  const Grid& g = ctx.grid;

  // all random draws happen up front so the result does not depend on threads
  struct Draw {
    double xi, alpha;
    std::vector<double> c;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::normal_distribution<double> nd;
  std::vector<Draw> draws(n_trials);
  for (auto& d : draws) {
    d.xi = uni(rng);
    d.alpha = uni(rng);
    d.c.resize(6);
    for (double& c : d.c) c = nd(rng);
  }

  rep.trials.resize(n_trials);
  auto run = [&](int t) {
    const Draw& d = draws[t];
    ProbeTrial tr;
    // ω within the traced window on both sides of ω_p; kernel seed within the
    // traced amplitudes; shape perturbation of relative size `scale`
    tr.omega = ctx.wp + 0.9 * (w_top - ctx.wp) * d.xi;
    const SolitonParams sp(ctx.p, tr.omega);
    const double kappa = sp.kappa();
    SymField u = sample_soliton(g, ctx.p, tr.omega) + (0.9 * a_span * d.alpha) * ctx.k;
    for (int n = 0; n < 3; ++n) {
      for (int m = 0; m < 2; ++m) {
        const double c = scale * d.c[2 * n + m];
        u += SymField::sample(g, n, [&](double x) {
          const double shape = m == 0 ? 1.0 : (kappa * x) * (kappa * x);
          return c * shape * soliton_power(sp, x, 0.5 * (ctx.p + 1.0)) / (1.0 + shape);
        });
      }
    }
    try {
      FullNewtonOptions o;
      o.max_iter = 50;
      o.polish_steps = 5;
      BranchPoint z;
      try {
        z = newton_fixed_omega(ctx, tr.omega, u, o);
      } catch (const NewtonDivergence&) {
        tr.reduced = true;
        z = newton_fixed_omega_reduced(ctx, tr.omega, u, 0.25 * a_span, o);
      }
      tr.amplitude = z.a;
      tr.distance = NAN;
      if (std::fabs(z.a) < 1e-8) {
        const BranchPoint triv = newton_full(ctx, 0.0, tr.omega, sample_soliton(g, ctx.p, tr.omega));
        tr.distance = max_abs(z.field - triv.field);
        tr.cls = tr.distance < 1e-6 ? ZeroClass::trivial : ZeroClass::unclassified;
      } else if (std::fabs(z.a) <= a_span) {
        const BranchPoint q = branch_point_at(ctx, b, z.a);
        tr.distance = std::max(max_abs(z.field - q.field), std::fabs(z.omega - q.omega));
        tr.cls = tr.distance < 1e-6 ? ZeroClass::bifurcating : ZeroClass::unclassified;
      } else {
        tr.cls = ZeroClass::unclassified;
      }
    } catch (const NewtonDivergence&) {
      tr.cls = ZeroClass::not_converged;
    } catch (const SingularSystem&) {
      tr.cls = ZeroClass::not_converged;
    }
    rep.trials[t] = tr;
  };

  const int n_threads =
      std::max(1, std::min<int>(n_trials, static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int i = 0; i < n_threads; ++i) {
    pool.emplace_back([&] {
      for (int t = next++; t < n_trials; t = next++) run(t);
    });
  }
  for (auto& th : pool) th.join();

  for (const auto& tr : rep.trials) {
    switch (tr.cls) {
      case ZeroClass::trivial: ++rep.trivial; break;
      case ZeroClass::bifurcating: ++rep.bifurcating; break;
      case ZeroClass::unclassified: ++rep.unclassified; break;
      case ZeroClass::not_converged: ++rep.not_converged; break;
    }
    if (tr.reduced) ++rep.reduced;
  }
  return rep;
}

Eigen::VectorXd envelope(const SymField& u) {
  const Eigen::MatrixXd ph = to_physical(u);
  return ph.cwiseAbs().colwise().maxCoeff().transpose();
}

DecayCheck fit_decay(const Grid& g, const Eigen::VectorXd& profile, const std::string& name,
                     double predicted, double lower, double upper) {
  DecayCheck d;
  d.quantity = name;
  d.predicted = predicted;
  d.lower = lower;
  d.upper = upper;
  d.fitted = NAN;
  const double L = g.L;
  int j0 = static_cast<int>(std::ceil(L / 3 / g.dx()));
  int j1 = static_cast<int>(std::floor(2 * L / 3 / g.dx()));
  j1 = std::min(j1, g.half() - 1);
  while (j1 > j0 && !(std::fabs(profile(j1)) > 1e-250)) --j1;
  d.x0 = g.x(j0);
  d.x1 = g.x(j1);
  for (int j = j0; j <= j1; ++j) {
    if (!(std::fabs(profile(j)) > 1e-250)) {
      d.status = DecayStatus::inconclusive;
      return d;
    }
  }
  if (j1 - j0 + 1 < 16 || d.x1 - d.x0 < L / 12) {
    d.status = DecayStatus::inconclusive;
    return d;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = j1 - j0 + 1;
  for (int j = j0; j <= j1; ++j) {
    const double x = g.x(j), y = std::log(std::fabs(profile(j)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  d.fitted = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  d.status = (d.fitted >= lower && d.fitted <= upper) ? DecayStatus::pass : DecayStatus::fail;
  return d;
}

std::vector<DecayCheck> verify_decay(const LSContext& ctx, const BranchPoint& pt, double eps_rel,
                                     const BranchPoint* prev, const BranchPoint* next) {
  const Grid& g = ctx.grid;
  const double rw = std::sqrt(pt.omega);
  const double eps = eps_rel * rw;
  std::vector<DecayCheck> out;
  out.push_back(fit_decay(g, envelope(pt.field), "field_envelope", rw, rw - eps, rw + eps));
  if (pt.a != 0.0) {
    const double r1 = 0.5 * (ctx.p + 1.0) * std::sqrt(ctx.wp);
    const Eigen::VectorXd prof = pt.field.coeffs().row(1).transpose();
    out.push_back(fit_decay(g, prof, "kernel_mode_profile", r1, r1 - eps, r1 + eps));
  }
  if (prev && next) {
    const SymField da = (1.0 / (next->a - prev->a)) * (next->field - prev->field);
    out.push_back(fit_decay(g, envelope(da), "d_a_field", rw, rw - 2 * eps, INFINITY));
    // ∂_ωφ at fixed a from two auxiliary solutions around the point
    const double h = 1e-4 * pt.omega;
    const LSState sp = solve_auxiliary(ctx, pt.omega + h, pt.a);
    const LSState sm = solve_auxiliary(ctx, pt.omega - h, pt.a);
    const SymField dw = (0.5 / h) * (sp.phi - sm.phi);
    out.push_back(fit_decay(g, envelope(dw), "d_omega_field", rw, rw - 2 * eps, INFINITY));
  }
  return out;
}

std::string to_string(DecayStatus s) {
  switch (s) {
    case DecayStatus::pass: return "pass";
    case DecayStatus::fail: return "fail";
    case DecayStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

nlohmann::json to_json(const DecayCheck& d) {
  return {{"quantity", d.quantity}, {"predicted", d.predicted}, {"fitted", d.fitted},
          {"lower", d.lower},       {"upper", std::isfinite(d.upper) ? nlohmann::json(d.upper) : nlohmann::json(nullptr)},
          {"x0", d.x0},             {"x1", d.x1},
          {"status", to_string(d.status)}};
}

nlohmann::json to_json(const BranchFit& f) {
  return {{"omega2_fit", f.omega2_fit},
          {"omega2_fit_rms", f.omega2_rms},
          {"mass2_fit", f.mass2_fit},
          {"mass0", f.mass0},
          {"mass_remainder_exponent", f.mass_remainder_slope},
          {"points_in_fit", f.n_used},
          {"omega_evenness", f.evenness},
          {"field_symmetry", f.field_symmetry},
          {"min_field", f.min_field},
          {"max_residual", f.max_residual},
          {"max_constraint_error", f.max_constraint}};
}

nlohmann::json to_json(const UniquenessReport& r) {
  nlohmann::json j{{"n_trials", r.n_trials},         {"scale", r.scale},
                   {"seed", r.seed},                 {"trivial", r.trivial},
                   {"bifurcating", r.bifurcating},   {"unclassified", r.unclassified},
                   {"not_converged", r.not_converged}, {"reduced", r.reduced}};
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"omega", t.omega},
                      {"amplitude", t.amplitude},
                      {"class", to_string(t.cls)},
                      {"reduced", t.reduced},
                      {"distance", std::isfinite(t.distance) ? nlohmann::json(t.distance) : nlohmann::json(nullptr)}});
  }
  j["trials"] = trials;
  return j;
}

std::string branch_csv(const Branch& b) {
  std::ostringstream os;
  os.precision(17);
  os << "a,omega,mass,residual,min_field,newton_iters\n";
  for (const auto& pt : b.points) {
    os << pt.a << ',' << pt.omega << ',' << pt.mass << ',' << pt.residual << ',' << pt.min_field
       << ',' << pt.newton_iters << '\n';
  }
  return os.str();
}

}  // namespace linesol
