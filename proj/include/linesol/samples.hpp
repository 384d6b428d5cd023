// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "linesol/field.hpp"

namespace linesol {

/// R_ω sampled into mode 0.
SymField sample_soliton(const Grid& g, double p, double omega);
/// ∂_ωR_ω sampled into mode 0.
SymField sample_soliton_domega(const Grid& g, double p, double omega);
/// ψ_ω cos y, i.e. ψ_ω sampled into mode 1.
SymField sample_kernel_mode(const Grid& g, double p, double omega);
/// Kernel mode at the bifurcation frequency, k = ψ_{ω_p} cos y.
SymField kernel_mode(const Grid& g, double p);

}  // namespace linesol
