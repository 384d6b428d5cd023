// SPDX-License-Identifier: Apache-2.0
//
// Run configuration, its validation and hash, and the on-disk formats shared
// by the command-line front end: JSON results, CSV tables, field snapshots
// and the run manifest.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "linesol/field.hpp"

namespace linesol {

/// A violated configuration invariant; `invariant` names it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string invariant, const std::string& what)
      : std::invalid_argument(what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

struct RunConfig {
  std::vector<double> p{3.0};
  std::vector<double> omega;        // soliton / spectrum; empty means a default around ω_p
  std::optional<double> L;          // default 30/√(min ω scanned), per p
  int nx = 2049;
  int n_modes = 8;
  int fd_order = 8;
  double newton_tol = 1e-10;
  double eigen_tol = 1e-10;
  double fit_window = 0.25;         // branch fits use |a| ≤ fit_window · a_max
  double a_max = 0.0;               // 0: chosen per p by choose_a_max
  int steps = 16;
  double eps = 0.05;                // decay tolerance, relative to √ω
  int trials = 100;                 // uniqueness probe
  double probe_scale = 1e-2;
  std::uint64_t seed = 1;
  std::string out = "out";          // not part of the hash
};

inline const std::vector<std::string> kSubcommands{"soliton", "spectrum", "reduce", "branch",
                                                   "verify"};

/// Frequencies a subcommand scans for a given p: the configured list for
/// soliton and spectrum (default {ω_p} and {0.9, 1, 1.1}·ω_p), the window
/// [0.8, 1.2]·ω_p of the reduction otherwise.
std::vector<double> scanned_omegas(const RunConfig& c, const std::string& subcommand, double p);

/// Half-width L used for p: the configured value or 30/√(min ω scanned).
double domain_half_width(const RunConfig& c, const std::string& subcommand, double p);

/// Checks every invariant before any compute. Throws ValidationError.
void validate(const RunConfig& c, const std::string& subcommand);

/// Canonical JSON of everything that affects results (the output directory
/// is excluded), with the subcommand.
nlohmann::json canonical_json(const RunConfig& c, const std::string& subcommand);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// 16 lowercase hex digits of fnv1a64(canonical_json(c, subcommand).dump()).
std::string config_hash(const RunConfig& c, const std::string& subcommand);

/// %.17g.
std::string format_double(double v);

/// Rewrites every floating-point number of `j` with 17 significant digits.
std::string dump_json(const nlohmann::json& j);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Field snapshot: one JSON header line starting with '#', then the columns
/// x, mode_0, ..., mode_{N-1} over the half grid with 17 significant digits.
std::string field_snapshot_csv(const SymField& u, const std::string& hash,
                               const nlohmann::json& extra = nlohmann::json::object());

/// Inverse of field_snapshot_csv; bit-exact. Throws std::runtime_error on a
/// malformed snapshot.
SymField read_field_snapshot(const std::string& csv, nlohmann::json* header = nullptr);

struct Manifest {
  std::string hash;
  std::string subcommand;
  nlohmann::json config;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;
  int exit_code = 0;
};

nlohmann::json to_json(const Manifest& m);

/// Versions of the library and its dependencies.
nlohmann::json version_info();

inline constexpr const char* kLinesolVersion = "0.1.0";

}  // namespace linesol
