// SPDX-License-Identifier: Apache-2.0
//
// Low-lying eigenpairs of single cosine blocks. Eigenvalues are located by
// Sturm counts (inertia of a band LDLᵀ) and bisection, then polished by shifted
// inverse iteration with deflation against the pairs already found.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "linesol/field.hpp"
#include "linesol/operators.hpp"

namespace linesol {

class EigenError : public std::runtime_error {
 public:
  EigenError(const std::string& what, double last_residual)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

struct EigenOptions {
  double tol = 1e-10;        // relative residual target for each pair
  double shift = 1e-8;       // offset of the inverse-iteration shift from the bracket
  int max_iter = 50;
  // Inverse-iteration steps taken after the residual target is met. Each
  // shrinks the other components by about `shift`, which makes the vector
  // accurate far out in its tail and not only in norm.
  int extra_steps = 2;
};

struct EigenReport {
  int mode = 0;
  Parity parity = Parity::even_x;
  double threshold = 0.0;                 // ω + n², bottom of the continuum
  double continuum_band = 0.0;            // 5 / L²
  std::vector<double> eigenvalues;        // ascending
  std::vector<double> residuals;          // ‖Av - λv‖ / ‖v‖
  std::vector<double> predicted;          // closed-form values when known, NaN otherwise
  std::vector<bool> near_continuum;
  std::vector<Eigen::VectorXd> vectors;   // restricted half-grid unknowns, weighted-unit norm
};

/// Number of eigenvalues of the symmetric band matrix B strictly below sigma.
int sturm_count(const Eigen::SparseMatrix<double>& B, double sigma);

/// k lowest eigenpairs of `op` restricted to the given x-parity.
EigenReport lowest_eigenpairs(const ModeOperator& op, int k, Parity parity,
                              const EigenOptions& opts = {});

/// Blocks of L_{ω,+} at the sampled soliton with predicted values filled in:
/// even parity gives n² - ω/ω_p, odd parity gives n² (from dR/dx).
EigenReport soliton_block_spectrum(const Grid& g, double p, double omega, int n, Parity parity,
                                   int k, const EigenOptions& opts = {});

/// Relative residual ‖L_{ω,+,0}R^{(p+1)/2} + (ω/ω_p)R^{(p+1)/2}‖ / ‖R^{(p+1)/2}‖.
double ground_state_identity_residual(const Grid& g, double p, double omega);

struct SpectrumRow {
  double omega;
  double lambda_measured;   // second eigenvalue of the symmetric restriction
  double lambda_formula;    // 1 - ω/ω_p
  double ground_measured;   // lowest eigenvalue
  double ground_formula;    // -ω/ω_p
  int lambda_mode;          // block in which the second eigenvalue was found
};

struct SpectrumScan {
  double p;
  std::vector<SpectrumRow> rows;
  std::vector<double> fd_slopes;  // between consecutive ω values
  double slope_fit;               // least squares over all rows
  double slope_formula;           // -1/ω_p
};

/// For each ω, the lowest two eigenvalues over all even blocks of L_{ω,+} at
/// the sampled soliton, and the slope of the second one in ω.
SpectrumScan spectrum_scan(const Grid& g, double p, const std::vector<double>& omegas,
                           const EigenOptions& opts = {});

nlohmann::json to_json(const EigenReport& r);
nlohmann::json to_json(const SpectrumScan& s);

}  // namespace linesol
