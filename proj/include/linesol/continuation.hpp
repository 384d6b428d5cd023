// SPDX-License-Identifier: Apache-2.0
//
// Direct solution of F(ω, u) = 0 on the symmetric grid: the trivial curve
// (ω, R_ω) and the bifurcating curve (ω(a), Q(a)) parametrized by the
// kernel-mode amplitude a = ⟨u, k⟩.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "linesol/lyapunov_schmidt.hpp"

namespace linesol {

struct BranchPoint {
  double a = 0.0;
  double omega = 0.0;
  SymField field;
  double mass = 0.0;        // ‖u‖² in the discrete L²(ℝ×𝕋) inner product
  double residual = 0.0;    // ‖F(ω, u)‖
  double min_field = 0.0;   // min over the collocation grid
  int newton_iters = 0;
  std::vector<double> history;
};

enum class BranchKind { trivial, bifurcating };

struct Branch {
  BranchKind kind = BranchKind::bifurcating;
  std::vector<BranchPoint> points;  // ascending in a
  std::string provenance;           // config hash of the producing run
};

struct FullNewtonOptions {
  double tol = 1e-10;       // on ‖F‖; the constraint is held to 1e-12
  int max_iter = 30;
  int max_growth = 5;
  int polish_steps = 3;
};

/// Newton on {F(ω, u) = 0, ⟨u, k⟩ = a} for (u, ω) with the bordered Jacobian
/// [L_+(ω, u), u; (Wk)ᵀ, 0]. At a = 0 the bordered Jacobian is singular along
/// the trivial curve, so ω is held at omega0 and u is solved in mode 0 only.
/// Throws NewtonDivergence.
BranchPoint newton_full(const LSContext& ctx, double a, double omega0, const SymField& u0,
                        const FullNewtonOptions& opts = {});

/// Newton on F(ω, u) = 0 at fixed ω (no constraint), damped by backtracking
/// on ‖F‖. Throws NewtonDivergence.
BranchPoint newton_fixed_omega(const LSContext& ctx, double omega, const SymField& u0,
                               const FullNewtonOptions& opts = {});

/// Fallback for starts where damped Newton stalls at a nonzero minimum of
/// ‖F‖: solves F(ω, u) = μ k with ⟨u, k⟩ = a for (u, μ), finds a zero of the
/// scalar μ(a) by secant steps no longer than max_da starting at a = ⟨u0, k⟩,
/// and polishes with newton_fixed_omega. Throws NewtonDivergence.
BranchPoint newton_fixed_omega_reduced(const LSContext& ctx, double omega, const SymField& u0,
                                       double max_da, const FullNewtonOptions& opts = {});

struct TraceOptions {
  FullNewtonOptions newton;
  int min_halvings = 10;    // a step may shrink to a_max / 2^10 before failing
};

/// Marches a from 0 to +a_max and to -a_max in `steps` equal steps each with a
/// secant predictor and newton_full corrector. Requires steps ≥ 8.
Branch trace_branch(const LSContext& ctx, double a_max, int steps, const TraceOptions& opts = {});

/// Continues from the last two points of `seed` (same sign of a) to a_end in
/// steps of da. Used by trace_branch and for restart checks.
std::vector<BranchPoint> continue_branch(const LSContext& ctx, std::vector<BranchPoint> seed,
                                         double a_end, double da, const TraceOptions& opts = {});

/// Largest a in {0.2, 0.1, 0.05, ...} for which newton_full from the linear
/// prediction (ω_p, R + a k) converges in ≤ 8 iterations with a positive field.
double choose_a_max(const LSContext& ctx, double upper = 0.2);

struct BranchFit {
  double omega2_fit = 0;        // 2c from ω - ω_p = c a² over the fit window
  double omega2_rms = 0;        // rms of the fit residual
  double mass2_fit = 0;         // m from mass - mass(0) = m a²
  double mass0 = 0;             // mass at a = 0 on the grid
  double mass_remainder_slope = 0;  // fitted exponent of |mass - mass0 - m a²| vs |a|
  int n_used = 0;
  double evenness = 0;          // max |ω(a) - ω(-a)|
  double field_symmetry = 0;    // max |Q(a) - shift(Q(-a))|
  double min_field = 0;         // over all points
  double max_residual = 0;
  double max_constraint = 0;    // max |⟨Q, k⟩ - a|
};

/// Fits use 0 < |a| ≤ window · a_max.
BranchFit fit_branch(const LSContext& ctx, const Branch& b, double a_max, double window = 0.25);

/// Branch point at amplitude a by Newton from the branch interpolated there.
BranchPoint branch_point_at(const LSContext& ctx, const Branch& b, double a);

enum class ZeroClass { trivial, bifurcating, unclassified, not_converged };

struct ProbeTrial {
  double omega = 0, amplitude = 0;
  ZeroClass cls = ZeroClass::not_converged;
  double distance = 0;  // to the matched curve point (max abs), NaN if none
  bool reduced = false;   // plain Newton failed and the reduced fallback was used
};

struct UniquenessReport {
  int n_trials = 0, trivial = 0, bifurcating = 0, unclassified = 0, not_converged = 0;
  int reduced = 0;
  double scale = 0;
  std::uint64_t seed = 0;
  std::vector<ProbeTrial> trials;
};

/// Random symmetric perturbations of (ω, R_ω) near (ω_p, R_{ω_p}), polished by
/// fixed-ω Newton and classified against the two curves. Trials run in
/// parallel; the result does not depend on scheduling.
UniquenessReport uniqueness_probe(const LSContext& ctx, const Branch& b, int n_trials,
                                  double scale, std::uint64_t seed);

enum class DecayStatus { pass, fail, inconclusive };

struct DecayCheck {
  std::string quantity;
  double predicted = 0, fitted = 0, lower = 0, upper = 0;
  double x0 = 0, x1 = 0;
  DecayStatus status = DecayStatus::inconclusive;
};

/// Least-squares slope of log|profile| over the window [L/3, 2L/3] of the
/// half grid, shortened where the profile drops below 1e-250. Inconclusive
/// when fewer than 16 nodes or less than L/12 remain.
DecayCheck fit_decay(const Grid& g, const Eigen::VectorXd& profile, const std::string& name,
                     double predicted, double lower, double upper);

/// sup over y of |u(x, ·)| on the collocation grid.
Eigen::VectorXd envelope(const SymField& u);

/// Decay checks at a branch point with ε = eps_rel·√ω: the envelope of Q at
/// √ω ± ε, its kernel-mode profile at ((p+1)/2)√ω_p ± ε when a ≠ 0, and, when
/// neighbours are given, the envelopes of the difference quotients ∂_aQ and
/// ∂_ωφ, which must decay at least at √ω − 2ε.
std::vector<DecayCheck> verify_decay(const LSContext& ctx, const BranchPoint& pt, double eps_rel,
                                     const BranchPoint* prev = nullptr,
                                     const BranchPoint* next = nullptr);

std::string to_string(ZeroClass c);
std::string to_string(DecayStatus s);
nlohmann::json to_json(const DecayCheck& d);
nlohmann::json to_json(const BranchFit& f);
nlohmann::json to_json(const UniquenessReport& r);

/// CSV with columns a, omega, mass, residual, min_field, newton_iters.
std::string branch_csv(const Branch& b);

}  // namespace linesol
