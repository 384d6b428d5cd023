// SPDX-License-Identifier: Apache-2.0
#include "linesol/io.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "linesol/closed_form.hpp"

namespace linesol {

namespace {

bool is_known(const std::string& sub) {
  return std::find(kSubcommands.begin(), kSubcommands.end(), sub) != kSubcommands.end();
}

void require(bool ok, const char* invariant, const std::string& what) {
  if (!ok) throw ValidationError(invariant, what);
}

void dump_into(const nlohmann::json& j, std::string& out, int indent) {
  const std::string pad(indent, ' ');
  const std::string pad_in(indent + 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + nlohmann::json(it.key()).dump() + ": ";
        dump_into(it.value(), out, indent + 2);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad_in;
        dump_into(e, out, indent + 2);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::vector<double> scanned_omegas(const RunConfig& c, const std::string& subcommand, double p) {
  const double wp = omega_p(p);
  if (subcommand == "soliton") return c.omega.empty() ? std::vector<double>{wp} : c.omega;
  if (subcommand == "spectrum") {
    return c.omega.empty() ? std::vector<double>{0.9 * wp, wp, 1.1 * wp} : c.omega;
  }
  return {0.8 * wp, 1.2 * wp};
}

double domain_half_width(const RunConfig& c, const std::string& subcommand, double p) {
  if (c.L) return *c.L;
  const auto ws = scanned_omegas(c, subcommand, p);
  return 30.0 / std::sqrt(*std::min_element(ws.begin(), ws.end()));
}

void validate(const RunConfig& c, const std::string& subcommand) {
  require(is_known(subcommand), "subcommand", "unknown subcommand '" + subcommand + "'");
  require(!c.p.empty(), "p list non-empty", "at least one p is required");
  for (double p : c.p) {
    require(std::isfinite(p) && p > 1.0, "p > 1", "p must exceed 1, got " + format_double(p));
  }
  for (double w : c.omega) {
    require(std::isfinite(w) && w > 0.0, "omega > 0", "omega must be positive, got " + format_double(w));
  }
  require(c.nx >= 5 && c.nx % 2 == 1, "nx odd", "nx must be odd and at least 5, got " + std::to_string(c.nx));
  require(c.n_modes >= 2, "modes >= 2", "at least 2 cosine modes are needed for the kernel mode");
  require(c.fd_order >= 2 && c.fd_order <= 16 && c.fd_order % 2 == 0, "fd_order even in [2, 16]",
          "fd_order must be even and between 2 and 16");
  require(c.newton_tol > 0.0, "tolerances > 0", "newton tolerance must be positive");
  require(c.eigen_tol > 0.0, "tolerances > 0", "eigen tolerance must be positive");
  require(c.fit_window > 0.0 && c.fit_window <= 1.0, "tolerances > 0",
          "fit window must lie in (0, 1]");
  require(c.eps > 0.0, "tolerances > 0", "decay tolerance eps must be positive");
  require(c.a_max >= 0.0, "a_max >= 0", "a_max must be non-negative (0 selects it automatically)");
  require(c.steps >= 8, "steps >= 8", "the branch needs at least 8 steps per side");
  require(c.trials >= 1, "trials >= 1", "the uniqueness probe needs at least one trial");
  require(c.probe_scale > 0.0, "tolerances > 0", "probe scale must be positive");
  for (double p : c.p) {
    const auto ws = scanned_omegas(c, subcommand, p);
    const double wmin = *std::min_element(ws.begin(), ws.end());
    const double need = 30.0 / std::sqrt(wmin);
    const double L = domain_half_width(c, subcommand, p);
    require(std::isfinite(L) && L >= need, "L >= 30/sqrt(min omega scanned)",
            "L = " + format_double(L) + " is below 30/sqrt(" + format_double(wmin) +
                ") = " + format_double(need) + " for p = " + format_double(p));
  }
}

nlohmann::json canonical_json(const RunConfig& c, const std::string& subcommand) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["p"] = c.p;
  j["omega"] = c.omega;
  j["L"] = c.L ? nlohmann::json(*c.L) : nlohmann::json(nullptr);
  j["nx"] = c.nx;
  j["modes"] = c.n_modes;
  j["fd_order"] = c.fd_order;
  j["newton_tol"] = c.newton_tol;
  j["eigen_tol"] = c.eigen_tol;
  j["fit_window"] = c.fit_window;
  j["a_max"] = c.a_max;
  j["steps"] = c.steps;
  j["eps"] = c.eps;
  j["trials"] = c.trials;
  j["probe_scale"] = c.probe_scale;
  j["seed"] = c.seed;
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const RunConfig& c, const std::string& subcommand) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(dump_json(canonical_json(c, subcommand)))));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const nlohmann::json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << content;
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

std::string field_snapshot_csv(const SymField& u, const std::string& hash, const nlohmann::json& extra) {
  const Grid& g = u.grid();
  nlohmann::json h = extra;
  h["config_hash"] = hash;
  h["L"] = g.L;
  h["nx"] = g.nx;
  h["modes"] = g.n_modes;
  h["fd_order"] = g.fd_order;
  h["parity"] = u.parity() == Parity::even_x ? "even_x" : "odd_x";
  std::string out = "# " + h.dump() + "\n";
  out += "x";
  for (int n = 0; n < g.n_modes; ++n) out += ",mode_" + std::to_string(n);
  out += "\n";
  for (int j = 0; j < g.half(); ++j) {
    out += format_double(g.x(j));
    for (int n = 0; n < g.n_modes; ++n) out += "," + format_double(u(n, j));
    out += "\n";
  }
  return out;
}

SymField read_field_snapshot(const std::string& csv, nlohmann::json* header) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("snapshot: missing JSON header line");
  }
  const nlohmann::json h = nlohmann::json::parse(line.substr(2));
  const Grid g(h.at("L").get<double>(), h.at("nx").get<int>(), h.at("modes").get<int>(),
               h.at("fd_order").get<int>());
  const Parity par = h.at("parity").get<std::string>() == "odd_x" ? Parity::odd_x : Parity::even_x;
  if (!std::getline(in, line) || line.rfind("x,", 0) != 0) {
    throw std::runtime_error("snapshot: missing column header");
  }
  SymField u(g, par);
  for (int j = 0; j < g.half(); ++j) {
    if (!std::getline(in, line)) throw std::runtime_error("snapshot: truncated at row " + std::to_string(j));
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');  // x, implied by the grid
    for (int n = 0; n < g.n_modes; ++n) {
      if (!std::getline(row, cell, ',')) throw std::runtime_error("snapshot: short row " + std::to_string(j));
      u(n, j) = std::strtod(cell.c_str(), nullptr);
    }
  }
  if (header) *header = h;
  return u;
}

nlohmann::json to_json(const Manifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.hash;
  j["subcommand"] = m.subcommand;
  j["config"] = m.config;
  j["versions"] = version_info();
  j["outputs"] = m.outputs;
  j["wall_time_s"] = m.wall_time_s;
  j["exit_code"] = m.exit_code;
  return j;
}

nlohmann::json version_info() {
  nlohmann::json j;
  j["linesol"] = kLinesolVersion;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["cli11"] = CLI11_VERSION;
#if defined(__clang__)
  j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  j["compiler"] = std::string("gcc ") + __VERSION__;
#endif
  return j;
}

}  // namespace linesol
