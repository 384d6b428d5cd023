// SPDX-License-Identifier: Apache-2.0
#include "linesol/samples.hpp"

#include "linesol/closed_form.hpp"

namespace linesol {

SymField sample_soliton(const Grid& g, double p, double omega) {
  const SolitonParams sp(p, omega);
  return SymField::sample(g, 0, [&](double x) { return soliton_value(sp, x); });
}

SymField sample_soliton_domega(const Grid& g, double p, double omega) {
  const SolitonParams sp(p, omega);
  return SymField::sample(g, 0, [&](double x) { return soliton_derivatives(sp, x).dR_domega; });
}

SymField sample_kernel_mode(const Grid& g, double p, double omega) {
  if (g.n_modes < 2) throw std::invalid_argument("kernel mode needs at least two y modes");
  const SolitonParams sp(p, omega);
  const double c = psi_normalization(sp);
  return SymField::sample(g, 1, [&](double x) {
    return c * soliton_power(sp, x, 0.5 * (p + 1.0));
  });
}

SymField kernel_mode(const Grid& g, double p) { return sample_kernel_mode(g, p, omega_p(p)); }

}  // namespace linesol
