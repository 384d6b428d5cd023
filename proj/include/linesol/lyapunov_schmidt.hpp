// SPDX-License-Identifier: Apache-2.0
//
// Lyapunov–Schmidt reduction of F(ω, u) = 0 at the bifurcation point
// (ω_p, R_{ω_p}) along the kernel mode k = ψ_{ω_p} cos y:
//   φ(ω, a) = R_{ω_p} + a k + η(ω, a),  η ⊥ k,  P_⊥ F(ω, φ) = 0,
//   F_∥(ω, a) = ⟨F(ω, φ), k⟩.
// Derivatives of φ and F_∥ come from implicit differentiation of the
// auxiliary equation; every field is a T⁻¹ = (P_⊥ L_+|_{X₂})⁻¹ application.
#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "linesol/bordered.hpp"
#include "linesol/field.hpp"

namespace linesol {

class NewtonDivergence : public std::runtime_error {
 public:
  NewtonDivergence(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Everything fixed by p and the grid: R_{ω_p} and the kernel mode.
struct LSContext {
  double p;
  double wp;          // ω_p
  Grid grid;
  SymField R;         // sampled R_{ω_p}
  SymField k;         // ψ_{ω_p} cos y, unit norm in the discrete inner product
  Eigen::VectorXd kw; // flattened W ⊙ k, so that kwᵀ u = ⟨u, k⟩

  LSContext(double p_, const Grid& g);
};

/// Default grid: L = 30/√(0.8 ω_p) (covers ω ≥ 0.8 ω_p), nx = 2049, 8 modes.
Grid default_ls_grid(double p, int nx = 2049, int n_modes = 8, int fd_order = 8);

struct AuxOptions {
  double tol = 1e-10;      // converged when ‖P_⊥F‖ < tol
  int max_iter = 50;
  int max_growth = 5;      // consecutive residual increases before giving up
  int polish_steps = 3;    // extra Newton steps once tol is met, while they still help
};

struct LSState {
  double omega = 0.0;
  double a = 0.0;
  SymField eta;
  SymField phi;
  double aux_residual = 0.0;
  double f_parallel = 0.0;
  double E_diag = 0.0;     // F_∥, the coefficient of the kernel-mode residual
  int iterations = 0;
  std::vector<double> history;
  std::shared_ptr<const BorderedSolver> T;  // bordered L_+(ω, a) at φ
};

SymField project_perp(const LSContext& ctx, const SymField& f);

/// Newton on h ∈ X₂ for P_⊥F(ω, R + a k + h) = 0. Throws NewtonDivergence.
LSState solve_auxiliary(const LSContext& ctx, double omega, double a,
                        const std::optional<SymField>& warm_start = std::nullopt,
                        const AuxOptions& opts = {});

/// The x ∈ X₂ with P_⊥L_+(ω, a)x = P_⊥rhs. Throws SingularSystem.
SymField solve_T(const LSContext& ctx, const LSState& state, const SymField& rhs);

/// ⟨F(ω, φ), k⟩ recomputed from the state.
double f_parallel(const LSContext& ctx, const LSState& state);

/// V_k = p(p-1)⋯(p-k+1) φ^{p-k} on the collocation grid (floored where φ is
/// below kPowerFloor and the power is negative).
Eigen::MatrixXd potential_V(const LSContext& ctx, const SymField& phi, int order);

struct DerivativeBundle {
  int order = 0;
  SymField a, w;                   // ∂_aφ, ∂_ωφ
  SymField aa, aw, ww;             // second order
  SymField aaa, aaw, aww, www;     // third order
};

struct FparBundle {
  int order = 0;
  double a = 0, w = 0;
  double aa = 0, aw = 0, ww = 0;
  double aaa = 0, aaw = 0, aww = 0, www = 0;
};

/// φ-derivative fields up to `order` (1..3). Throws PositivityError if p < 2
/// (or p < 3 at order 3) and φ is not positive.
DerivativeBundle phi_derivatives(const LSContext& ctx, const LSState& state, int order);

/// F_∥ derivatives up to the order of `d`.
FparBundle fpar_derivatives(const LSContext& ctx, const LSState& state, const DerivativeBundle& d);

struct GValue {
  double g = 0, dg_da = 0, dg_dw = 0;
  double d2g_da2 = NAN;  // only at a = 0, = ∂_a³F_∥ / 3
};

/// Crandall–Rabinowitz g(ω, a) = F_∥/a with its a = 0 limit.
GValue g_value_and_derivs(const LSContext& ctx, double omega, double a,
                          const std::optional<SymField>& warm_start = std::nullopt);

struct PitchforkCoefficient {
  double p = 0, wp = 0;
  // ⟨T⁻¹h, h⟩ with h = R^{p-2}k², and ⟨R^{p-3}, k⁴⟩ (grid and closed form)
  double t_inv_hh = 0, quartic = 0, quartic_closed_form = 0;
  double d3F = 0;                 // ∂_a³F_∥(ω_p, 0)
  double omega2_direct = 0;       // -ω_p{p(p-1)}²⟨T⁻¹h,h⟩ - p(p-1)(p-2)(ω_p/3)⟨R^{p-3},k⁴⟩
  double omega2_via_d3F = 0;      // +(ω_p/3) ∂_a³F_∥
  double discrepancy = 0;         // relative difference of the two routes
  // The same two expressions with the opposite overall sign, as sometimes
  // quoted; kept for comparison only.
  double omega2_direct_flipped = 0;
  double omega2_via_d3F_flipped = 0;
  double dg_dw = 0;               // ∂_ωg(ω_p, 0) = ∂_a∂_ωF_∥
  bool floor_active = false;
};

/// Both routes at (ω_p, 0). ω'' = -∂_a²g/∂_ωg with ∂_ωg = -1/ω_p.
PitchforkCoefficient pitchfork_coefficient(const LSContext& ctx);

struct MassCoefficient {
  double factor = 0;          // (5-p)/(4(p-1))
  double norm_R2 = 0;         // ‖R_{ω_p}‖²_{L²(ℝ)}
  double mass2 = 0;           // (1/ω_p){2π ω'' factor ‖R‖² - 1}
  double constant_mass = 0;   // 2π‖R‖² = ‖R_{ω_p}‖²_{L²(ℝ×𝕋)}
  // The variants with the torus measure taken as π (and no 2π in m₂), as
  // sometimes quoted; comparison only, they disagree with the branch.
  double mass2_as_printed = 0;      // (1/ω_p){ω'' factor ‖R‖² - 1}
  double constant_as_printed = 0;   // π‖R‖²
};

MassCoefficient mass_expansion_coefficient(double p, double omega2);

nlohmann::json to_json(const PitchforkCoefficient& pc, const MassCoefficient& mc);

}  // namespace linesol
