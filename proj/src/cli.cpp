// SPDX-License-Identifier: Apache-2.0
#include "linesol/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "CLI11.hpp"
#include "linesol/acceptance.hpp"
#include "linesol/closed_form.hpp"
#include "linesol/continuation.hpp"
#include "linesol/lyapunov_schmidt.hpp"
#include "linesol/operators.hpp"
#include "linesol/parallel.hpp"
#include "linesol/spectral.hpp"

namespace linesol {

namespace fs = std::filesystem;

namespace {

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Artifacts {
 public:
  Artifacts(const RunConfig& c, std::string hash, std::vector<std::string>* list)
      : dir_(c.out), hash_(std::move(hash)), list_(list) {}

  const std::string& hash() const { return hash_; }

  // `stem` gets the hash appended before the extension
  void write(const std::string& stem, const std::string& ext, const std::string& content) {
    const fs::path path = dir_ / (stem + "_" + hash_ + ext);
    write_text_file(path, content);
    if (list_) list_->push_back(path.filename().string());
  }
  void json(const std::string& stem, nlohmann::json j) {
    j["config_hash"] = hash_;
    write(stem, ".json", dump_json(j));
  }

 private:
  fs::path dir_;
  std::string hash_;
  std::vector<std::string>* list_;
};

Grid ls_grid(const RunConfig& c, double p) {
  if (c.L) return Grid(*c.L, c.nx, c.n_modes, c.fd_order);
  return default_ls_grid(p, c.nx, c.n_modes, c.fd_order);
}

nlohmann::json header(const std::string& sub, const RunConfig& c) {
  return {{"subcommand", sub}, {"config", canonical_json(c, sub)}};
}

int cmd_soliton(const RunConfig& c, Artifacts& art, std::ostream& out) {
  nlohmann::json res = header("soliton", c);
  res["results"] = nlohmann::json::array();
  for (double p : c.p) {
    for (double w : scanned_omegas(c, "soliton", p)) {
      const SolitonParams sp(p, w);
      nlohmann::json r{{"p", p},
                       {"omega", w},
                       {"omega_p", omega_p(p)},
                       {"amplitude", sp.amplitude()},
                       {"kappa", sp.kappa()},
                       {"R0", soliton_value(sp, 0.0)},
                       {"psi_normalization", psi_normalization(sp)},
                       {"line_mass", soliton_power_integral(sp, 2.0)}};
      std::string csv = "x,R,dR_dx,dR_domega,psi,R_scaled\n";
      nlohmann::json table = nlohmann::json::array();
      out << "p = " << tag(p) << ", omega = " << tag(w) << ": omega_p = " << tag(omega_p(p)) << "\n";
      char line[160];
      std::snprintf(line, sizeof line, "%8s %12s %12s %12s %12s\n", "x", "R", "dR/dx", "dR/domega", "psi");
      out << line;
      for (int i = 0; i <= 20; ++i) {
        const double x = 0.5 * i;
        const SolitonDerivatives d = soliton_derivatives(sp, x);
        const double R = soliton_value(sp, x), psi = psi_value(sp, x), Rs = soliton_value_scaled(sp, x);
        table.push_back({{"x", x}, {"R", R}, {"dR_dx", d.dR_dx}, {"dR_domega", d.dR_domega},
                         {"psi", psi}, {"R_scaled", Rs}});
        csv += format_double(x) + "," + format_double(R) + "," + format_double(d.dR_dx) + "," +
               format_double(d.dR_domega) + "," + format_double(psi) + "," + format_double(Rs) + "\n";
        std::snprintf(line, sizeof line, "%8.3f %12.6f %12.6f %12.6f %12.6f\n", x, R, d.dR_dx + 0.0,
                      d.dR_domega, psi);
        out << line;
      }
      std::snprintf(line, sizeof line, "R(0) = %.6f\n", soliton_value(sp, 0.0));
      out << line;
      r["table"] = table;
      nlohmann::json ids = nlohmann::json::array();
      double worst = 0.0;
      for (double q : {1.0, 2.0, 3.0}) {
        for (double rr : {1.5, 2.0, 3.0}) {
          const IdentityResiduals ir = identity_residuals(sp, q, rr);
          worst = std::max({worst, ir.res_q, ir.res_r});
          ids.push_back({{"q", q}, {"r", rr}, {"res_q", ir.res_q}, {"res_r", ir.res_r},
                         {"lhs_q", ir.lhs_q}, {"rhs_q", ir.rhs_q}, {"lhs_r", ir.lhs_r}, {"rhs_r", ir.rhs_r}});
        }
      }
      r["identity_residuals"] = ids;
      r["max_identity_residual"] = worst;
      std::snprintf(line, sizeof line, "max identity residual %.2e\n\n", worst);
      out << line;
      art.write("soliton_p" + tag(p) + "_w" + tag(w), ".csv", csv);
      res["results"].push_back(r);
    }
  }
  art.json("soliton", res);
  return kExitOk;
}

int cmd_spectrum(const RunConfig& c, Artifacts& art, std::ostream& out) {
  EigenOptions eo;
  eo.tol = c.eigen_tol;
  const auto per = parallel_map(c.p, [&](double p) {
    const Grid g(domain_half_width(c, "spectrum", p), c.nx, c.n_modes, c.fd_order);
    const auto ws = scanned_omegas(c, "spectrum", p);
    nlohmann::json r{{"p", p}, {"omega_p", omega_p(p)}, {"L", g.L}};
    nlohmann::json rows = nlohmann::json::array();
    for (double w : ws) {
      nlohmann::json blocks = nlohmann::json::array();
      blocks.push_back(to_json(soliton_block_spectrum(g, p, w, 0, Parity::even_x, 2, eo)));
      blocks.push_back(to_json(soliton_block_spectrum(g, p, w, 0, Parity::odd_x, 1, eo)));
      for (int n = 1; n < std::min(c.n_modes, 4); ++n) {
        blocks.push_back(to_json(soliton_block_spectrum(g, p, w, n, Parity::even_x, 1, eo)));
      }
      rows.push_back({{"omega", w}, {"blocks", blocks},
                      {"ground_state_identity_residual", ground_state_identity_residual(g, p, w)}});
    }
    r["reports"] = rows;
    if (ws.size() >= 2) r["scan"] = to_json(spectrum_scan(g, p, ws, eo));
    return r;
  });
  nlohmann::json res = header("spectrum", c);
  res["results"] = per;
  for (const auto& r : per) {
    out << "p = " << tag(r["p"].get<double>()) << "\n";
    for (const auto& row : r["reports"]) {
      out << "  omega = " << format_double(row["omega"].get<double>()) << ":";
      for (const auto& b : row["blocks"]) {
        char buf[96];
        std::snprintf(buf, sizeof buf, " n=%d%s %.9f", b["mode"].get<int>(),
                      b["parity"] == "odd_x" ? "(odd)" : "", b["eigenvalues"][0].get<double>());
        out << buf;
      }
      out << "\n";
    }
    if (r.contains("scan")) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  slope %.9f (formula %.9f)\n", r["scan"]["slope_fit"].get<double>(),
                    r["scan"]["slope_formula"].get<double>());
      out << buf;
    }
  }
  art.json("spectrum", res);
  return kExitOk;
}

nlohmann::json norms(const DerivativeBundle& d) {
  nlohmann::json j{{"a", norm(d.a)}, {"w", norm(d.w)}};
  if (d.order >= 2) {
    j["aa"] = norm(d.aa);
    j["aw"] = norm(d.aw);
    j["ww"] = norm(d.ww);
  }
  if (d.order >= 3) {
    j["aaa"] = norm(d.aaa);
    j["aaw"] = norm(d.aaw);
    j["aww"] = norm(d.aww);
    j["www"] = norm(d.www);
  }
  return j;
}

nlohmann::json to_json_fpar(const FparBundle& f) {
  return {{"a", f.a},   {"w", f.w},     {"aa", f.aa},   {"aw", f.aw},  {"ww", f.ww},
          {"aaa", f.aaa}, {"aaw", f.aaw}, {"aww", f.aww}, {"www", f.www}};
}

int cmd_reduce(const RunConfig& c, Artifacts& art, std::ostream& out) {
  struct Out {
    nlohmann::json j;
    std::string kernel_csv;
  };
  const auto per = parallel_map(c.p, [&](double p) {
    const LSContext ctx(p, ls_grid(c, p));
    AuxOptions ao;
    ao.tol = c.newton_tol;
    const LSState s = solve_auxiliary(ctx, ctx.wp, 0.0, std::nullopt, ao);
    const DerivativeBundle d = phi_derivatives(ctx, s, 3);
    const FparBundle fb = fpar_derivatives(ctx, s, d);
    const GValue g = g_value_and_derivs(ctx, ctx.wp, 0.0);
    const PitchforkCoefficient pc = pitchfork_coefficient(ctx);
    const MassCoefficient mc = mass_expansion_coefficient(p, pc.omega2_direct);
    Out o;
    o.j = {{"p", p},
           {"omega_p", ctx.wp},
           {"L", ctx.grid.L},
           {"state", {{"omega", s.omega}, {"a", s.a}, {"aux_residual", s.aux_residual},
                      {"f_parallel", s.f_parallel}, {"iterations", s.iterations},
                      {"eta_norm", norm(s.eta)}, {"history", s.history}}},
           {"phi_derivative_norms", norms(d)},
           {"f_parallel_derivatives", to_json_fpar(fb)},
           {"g", {{"g", g.g}, {"dg_da", g.dg_da}, {"dg_dw", g.dg_dw}, {"d2g_da2", g.d2g_da2}}},
           {"coefficients", to_json(pc, mc)}};
    o.kernel_csv = field_snapshot_csv(ctx.k, art.hash(), {{"p", p}, {"field", "kernel_mode"}});
    return o;
  });
  nlohmann::json res = header("reduce", c);
  res["results"] = nlohmann::json::array();
  for (size_t i = 0; i < per.size(); ++i) {
    const auto& co = per[i].j["coefficients"];
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "p = %g: omega_p = %.12g, omega'' = %.12g (direct) %.12g (via d3F), "
                  "dg/dw = %.12g, m2 = %.9g\n",
                  c.p[i], co["omega_p"].get<double>(), co["omega2_direct"].get<double>(),
                  co["omega2_via_d3F"].get<double>(), co["dg_domega"].get<double>(),
                  co["mass2"].get<double>());
    out << buf;
    res["results"].push_back(per[i].j);
    art.write("reduce_kernel_p" + tag(c.p[i]), ".csv", per[i].kernel_csv);
  }
  art.json("reduce", res);
  return kExitOk;
}

int cmd_branch(const RunConfig& c, Artifacts& art, std::ostream& out) {
  struct Out {
    nlohmann::json j;
    std::string csv, snapshot;
  };
  TraceOptions to;
  to.newton.tol = c.newton_tol;
  const auto per = parallel_map(c.p, [&](double p) {
    const LSContext ctx(p, ls_grid(c, p));
    const double a_max = c.a_max > 0.0 ? c.a_max : choose_a_max(ctx);
    Branch b = trace_branch(ctx, a_max, c.steps, to);
    b.provenance = art.hash();
    const BranchFit f = fit_branch(ctx, b, a_max, c.fit_window);
    const PitchforkCoefficient pc = pitchfork_coefficient(ctx);
    const MassCoefficient mc = mass_expansion_coefficient(p, pc.omega2_direct);
    const size_t mid = b.points.size() / 2;
    const size_t i = mid + static_cast<size_t>(c.steps) / 2;
    nlohmann::json decay = nlohmann::json::array();
    for (const auto& d : verify_decay(ctx, b.points[i], c.eps, &b.points[i - 1], &b.points[i + 1])) {
      decay.push_back(to_json(d));
    }
    Out o;
    o.j = {{"p", p},
           {"omega_p", ctx.wp},
           {"a_max", a_max},
           {"points", b.points.size()},
           {"fit", to_json(f)},
           {"coefficients", to_json(pc, mc)},
           {"omega2_fit_error", std::fabs(f.omega2_fit - pc.omega2_direct) / std::fabs(pc.omega2_direct)},
           {"mass2_fit_error", std::fabs(f.mass2_fit - mc.mass2) / std::fabs(mc.mass2)},
           {"mass0_error", std::fabs(f.mass0 - mc.constant_mass) / mc.constant_mass},
           {"decay_at", b.points[i].a},
           {"decay", decay}};
    o.csv = branch_csv(b);
    o.snapshot = field_snapshot_csv(b.points.back().field, art.hash(),
                                    {{"p", p}, {"field", "branch_endpoint"},
                                     {"a", b.points.back().a}, {"omega", b.points.back().omega}});
    return o;
  });
  nlohmann::json res = header("branch", c);
  res["results"] = nlohmann::json::array();
  for (size_t i = 0; i < per.size(); ++i) {
    const auto& j = per[i].j;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "p = %g: a_max = %g, omega'' fit %.9g vs formula %.9g (rel %.2e), "
                  "m2 fit %.9g vs %.9g (rel %.2e)\n",
                  c.p[i], j["a_max"].get<double>(), j["fit"]["omega2_fit"].get<double>(),
                  j["coefficients"]["omega2_direct"].get<double>(), j["omega2_fit_error"].get<double>(),
                  j["fit"]["mass2_fit"].get<double>(), j["coefficients"]["mass2"].get<double>(),
                  j["mass2_fit_error"].get<double>());
    out << buf;
    res["results"].push_back(j);
    art.write("branch_p" + tag(c.p[i]), ".csv", per[i].csv);
    art.write("branch_endpoint_p" + tag(c.p[i]), ".csv", per[i].snapshot);
  }
  art.json("branch", res);
  return kExitOk;
}

int cmd_verify(const RunConfig& c, Artifacts& art, std::ostream& out) {
  const AcceptanceReport rep = run_acceptance(c, [&](const CriterionResult& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "  (%.1f s)", r.seconds);
    out << format_line(r) << buf << "\n" << std::flush;
  });
  nlohmann::json res = header("verify", c);
  res["report"] = to_json(rep);
  art.json("verify", res);
  return rep.gating_pass() ? kExitOk : kExitAcceptance;
}

nlohmann::json error_json(const std::string& kind, const std::string& message, int code) {
  return {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
}

}  // namespace

ParsedCommand parse_command_line(const std::vector<std::string>& args, std::ostream& out) {
  ParsedCommand pc;
  RunConfig& c = pc.config;
  CLI::App app{"Line soliton bifurcation toolkit", "linesol"};
  app.set_config("--config", "", "key=value file; flags given on the command line override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.add_option("--p", c.p, "exponents p > 1, comma separated")->delimiter(',');
  app.add_option("--omega", c.omega, "frequencies for soliton and spectrum, comma separated")->delimiter(',');
  double L = NAN;
  app.add_option("--L", L, "domain half-width (default 30/sqrt(min omega scanned))");
  app.add_option("--nx", c.nx, "grid points in x (odd)");
  app.add_option("--modes", c.n_modes, "cosine modes in y");
  app.add_option("--fd-order", c.fd_order, "finite-difference order in x");
  app.add_option("--a-max", c.a_max, "branch amplitude range (0 chooses it)");
  app.add_option("--steps", c.steps, "continuation steps per side");
  app.add_option("--tol", c.newton_tol, "Newton tolerance on the residual");
  app.add_option("--eigen-tol", c.eigen_tol, "eigenpair residual tolerance");
  app.add_option("--fit-window", c.fit_window, "fraction of a_max used by the branch fits");
  app.add_option("--eps", c.eps, "decay-rate tolerance relative to sqrt(omega)");
  app.add_option("--trials", c.trials, "uniqueness probe trials");
  app.add_option("--probe-scale", c.probe_scale, "uniqueness probe perturbation size");
  app.add_option("--seed", c.seed, "uniqueness probe seed");
  app.add_option("--out", c.out, "output directory")->envname("LINESOL_OUT");
  const std::map<std::string, std::string> about{
      {"soliton", "closed-form soliton tables and identity residuals"},
      {"spectrum", "low eigenvalues of the linearized operator per mode"},
      {"reduce", "reduced equation, derivative bundles and branch coefficients"},
      {"branch", "continuation of the bifurcating branch with fits and decay checks"},
      {"verify", "full acceptance suite"},
  };
  for (const auto& s : kSubcommands) app.add_subcommand(s, about.at(s))->fallthrough();

  std::vector<const char*> argv{"linesol"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, out);
    pc.help = true;
    return pc;
  } catch (const CLI::ParseError& e) {
    throw ValidationError("parsable config", e.what());
  }
  pc.subcommand = app.get_subcommands().front()->get_name();
  if (!std::isnan(L)) c.L = L;
  return pc;
}

int run_subcommand(const std::string& sub, const RunConfig& c, std::ostream& out,
                   std::vector<std::string>* outputs) {
  Artifacts art(c, config_hash(c, sub), outputs);
  if (sub == "soliton") return cmd_soliton(c, art, out);
  if (sub == "spectrum") return cmd_spectrum(c, art, out);
  if (sub == "reduce") return cmd_reduce(c, art, out);
  if (sub == "branch") return cmd_branch(c, art, out);
  if (sub == "verify") return cmd_verify(c, art, out);
  throw ValidationError("subcommand", "unknown subcommand '" + sub + "'");
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  ParsedCommand pc;
  try {
    pc = parse_command_line(args, out);
    if (pc.help) return kExitOk;
    validate(pc.config, pc.subcommand);
  } catch (const ValidationError& e) {
    nlohmann::json j = error_json("validation", e.what(), kExitValidation);
    j["error"]["invariant"] = e.invariant();
    err << dump_json(j);
    return kExitValidation;
  }

  const RunConfig& c = pc.config;
  const std::string hash = config_hash(c, pc.subcommand);
  Manifest m;
  m.hash = hash;
  m.subcommand = pc.subcommand;
  m.config = canonical_json(c, pc.subcommand);
  nlohmann::json failure;
  try {
    m.exit_code = run_subcommand(pc.subcommand, c, out, &m.outputs);
  } catch (const NewtonDivergence& e) {
    failure = error_json("numerical", e.what(), kExitNumerical);
    failure["error"]["type"] = "newton_divergence";
    failure["error"]["history"] = e.history();
  } catch (const EigenError& e) {
    failure = error_json("numerical", e.what(), kExitNumerical);
    failure["error"]["type"] = "eigen";
    failure["error"]["last_residual"] = e.last_residual();
  } catch (const SingularSystem& e) {
    failure = error_json("numerical", e.what(), kExitNumerical);
    failure["error"]["type"] = "singular_system";
  } catch (const PositivityError& e) {
    failure = error_json("numerical", e.what(), kExitNumerical);
    failure["error"]["type"] = "positivity";
  } catch (const std::domain_error& e) {
    failure = error_json("numerical", e.what(), kExitNumerical);
    failure["error"]["type"] = "domain";
  } catch (const std::runtime_error& e) {
    failure = error_json("numerical", e.what(), kExitNumerical);
    failure["error"]["type"] = "runtime";
  }
  if (!failure.is_null()) {
    failure["config_hash"] = hash;
    err << dump_json(failure);
    m.exit_code = kExitNumerical;
    const fs::path path = fs::path(c.out) / ("error_" + hash + ".json");
    write_text_file(path, dump_json(failure));
    m.outputs.push_back(path.filename().string());
  }
  m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text_file(fs::path(c.out) / ("manifest_" + hash + ".json"), dump_json(to_json(m)));
  return m.exit_code;
}

}  // namespace linesol
