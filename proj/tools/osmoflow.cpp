// osmoflow command-line tool: mode solves, spectrum reports, nonlinear
// simulation, and the one-shot verification battery, with deterministic
// CSV/JSON outputs (fixed seed, no timestamps; every file carries the tool
// version and the hash of the effective configuration).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "osmoflow/config.hpp"
#include "osmoflow/dynamics.hpp"
#include "osmoflow/equilibria.hpp"
#include "osmoflow/linop.hpp"
#include "osmoflow/serialize.hpp"
#include "osmoflow/stokes.hpp"
#include "osmoflow/verify.hpp"
#include "osmoflow/version.hpp"

namespace {

using nlohmann::json;
using namespace osmoflow;

// shortest exactly-round-tripping decimal form; locale-independent
std::string dtos(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string metadata_line(const RunConfig& cfg) {
  return std::string("# osmoflow version=") + version() +
         " config_hash=" + cfg.hash() + "\n";
}

json base_record(const RunConfig& cfg) {
  json j;
  j["tool"] = "osmoflow";
  j["version"] = version();
  j["config_hash"] = cfg.hash();
  return j;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::filesystem::path prepare_out_dir(const std::string& dir) {
  std::filesystem::path p = dir.empty() ? "." : dir;
  std::filesystem::create_directories(p);
  return p;
}

void emit_json(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    auto out = open_output(out_path);
    out << j.dump(2) << "\n";
  }
}

RunConfig load_cfg(const std::string& params_path) {
  RunConfig cfg;
  if (!params_path.empty()) cfg = load_run_config(params_path);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------- stokes --

struct StokesArgs {
  int k = 2;
  double h_normal = std::numeric_limits<double>::quiet_NaN();  // default m - k^2
  double h_tangent = 0.0;
  int n = 0;  // 0: use config
  std::string params_path, out_path;
};

int cmd_stokes(const StokesArgs& a) {
  RunConfig cfg = load_cfg(a.params_path);
  const int n = a.n > 0 ? a.n : cfg.stokes_n;
  ModeStokesProblem prob;
  prob.k = a.k;
  prob.params = cfg.params;
  prob.n_inner = prob.n_outer = n;
  const double h = std::isnan(a.h_normal)
                       ? cfg.params.m() - static_cast<double>(a.k) * a.k
                       : a.h_normal;
  prob.h_normal = {h, 0.0};
  prob.h_tangent = {a.h_tangent, 0.0};
  const ModeFlowSolution sol = solve_stokes_mode(prob);

  json j = base_record(cfg);
  j["k"] = a.k;
  j["n"] = n;
  j["h_normal"] = h;
  j["h_tangent"] = a.h_tangent;
  j["v_interface"] = sol.v_interface.real();
  j["pressure_jump"] = sol.pressure_jump.real();
  j["residuals"] = {{"solver", sol.solver_residual}};
  emit_json(j, a.out_path);
  return 0;
}

// ------------------------------------------------------------- verify-ls --

struct VerifyLsArgs {
  double nu_plus = 1.0, nu_minus = 1.0;
  std::vector<double> xi = {0.7, 1.3, -2.2, 5.0};
  std::string out_path;
};

int cmd_verify_ls(const VerifyLsArgs& a) {
  Eigen::VectorXd xi(static_cast<int>(a.xi.size()));
  for (int i = 0; i < xi.size(); ++i) xi[i] = a.xi[static_cast<std::size_t>(i)];
  const LSReport rep = verify_lopatinskii(a.nu_plus, a.nu_minus, xi);

  RunConfig cfg;  // the symbol check does not take the TOML config
  cfg.params.nu_plus = a.nu_plus;
  cfg.params.nu_minus = a.nu_minus;
  json j = base_record(cfg);
  j["nu_plus"] = a.nu_plus;
  j["nu_minus"] = a.nu_minus;
  j["xi"] = a.xi;
  j["det_M"] = {{"re", rep.det_M.real()}, {"im", rep.det_M.imag()}};
  j["expected_det"] = -2.0 * (a.nu_plus + a.nu_minus) * (a.nu_plus + a.nu_minus);
  j["min_singular_value"] = rep.min_singular_value;
  j["det_spread"] = rep.det_spread;
  emit_json(j, a.out_path);
  return 0;
}

// --------------------------------------------------------------- spectrum --

struct SpectrumArgs {
  int k_max = 0;  // 0: use config
  int n = 0;
  std::string params_path, out_dir, out_path;
};

int cmd_spectrum(const SpectrumArgs& a) {
  RunConfig cfg = load_cfg(a.params_path);
  if (a.k_max > 0) cfg.k_max = a.k_max;
  if (a.n > 0) cfg.n_inner = cfg.n_outer = a.n;
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  cfg.validate();

  SpectrumOptions opt;
  opt.spurious_rel = cfg.spurious_rel;
  opt.tol_zero = cfg.tol_zero;
  opt.stokes_n = cfg.stokes_n;
  const SpectrumReport rep = spectrum_report(cfg.params, cfg.k_max, cfg.n_inner, opt);

  json j = base_record(cfg);
  j["k_max"] = rep.k_max;
  j["n"] = rep.n;
  j["tol_zero"] = rep.tol_zero;
  j["spurious_rel"] = rep.spurious_rel;
  j["kernel_dimension"] = rep.kernel_dimension;
  j["gap"] = rep.gap;
  j["max_imag"] = rep.max_imag;
  j["refinement_delta"] = rep.refinement_delta;
  json by_mode = json::object(), modes = json::object();
  for (const auto& [k, cnt] : rep.kernel_by_mode) by_mode[std::to_string(k)] = cnt;
  for (const auto& [k, lams] : rep.modes) {
    json arr = json::array();
    for (const auto& lam : lams) arr.push_back({lam.real(), lam.imag()});
    modes[std::to_string(k)] = std::move(arr);
  }
  j["kernel_by_mode"] = std::move(by_mode);
  j["modes"] = std::move(modes);

  const auto dir = prepare_out_dir(cfg.out_dir);
  auto csv = open_output(dir / "spectrum.csv");
  csv << metadata_line(cfg) << "k,re_lambda,im_lambda\n";
  for (const auto& [k, lams] : rep.modes)
    for (const auto& lam : lams)
      csv << k << "," << dtos(lam.real()) << "," << dtos(lam.imag()) << "\n";

  emit_json(j, a.out_path);
  return 0;
}

// --------------------------------------------------------------- simulate --

struct SimulateArgs {
  std::string init_path, params_path, out_dir;
  double dt = -1.0, t_final = -1.0;
  int sample_every = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  RunConfig cfg = load_cfg(a.params_path);
  if (a.dt >= 0.0) cfg.dt = a.dt;
  if (a.t_final > 0.0) cfg.t_final = a.t_final;
  if (a.sample_every > 0) cfg.sample_every = a.sample_every;
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  cfg.validate();

  const RadialState s0 = load_state(a.init_path);
  if (std::abs(s0.R_container() - cfg.params.R_container) >
      1e-12 * cfg.params.R_container)
    throw std::invalid_argument(
        "initial state container radius disagrees with the configured params");

  // fixed reference equilibrium: the balance root nearest the initial radius
  const auto m0 = phase_mass(s0);
  const auto scan =
      find_equilibrium(m0.first, m0.second, cfg.params.R_container, cfg.params.dim);
  double r_star = std::numeric_limits<double>::quiet_NaN();
  if (scan.found()) {
    const auto& best = *std::min_element(
        scan.roots.begin(), scan.roots.end(),
        [&s0](const Equilibrium& x, const Equilibrium& y) {
          return std::abs(x.R_star - s0.R) < std::abs(y.R_star - s0.R);
        });
    r_star = best.R_star;
  }

  StepperConfig sc;
  sc.dt = cfg.dt;
  sc.t_end = cfg.t_final;
  sc.sample_every = cfg.sample_every;
  const Trajectory tr = simulate_radial(s0, cfg.params, sc);

  const auto dir = prepare_out_dir(cfg.out_dir);
  auto csv = open_output(dir / "trajectory.csv");
  csv << metadata_line(cfg)
      << "t,R,M_plus,M_minus,E,D,distance_to_equilibrium\n";
  for (const auto& s : tr.samples)
    csv << dtos(s.t) << "," << dtos(s.R) << "," << dtos(s.mass_plus) << ","
        << dtos(s.mass_minus) << "," << dtos(s.energy) << ","
        << dtos(s.dissipation) << "," << dtos(std::abs(s.R - r_star)) << "\n";

  json j = base_record(cfg);
  j["state"] = to_json(tr.final_state);
  j["status"] = to_string(tr.status);
  j["steps"] = tr.steps;
  j["dt"] = tr.dt;
  j["R_star"] = r_star;
  {
    auto out = open_output(dir / "final_state.json");
    out << j.dump(2) << "\n";
  }

  if (tr.status != SimStatus::Completed) {
    std::cerr << "simulation did not complete: " << to_string(tr.status)
              << (tr.message.empty() ? "" : ": " + tr.message) << "\n";
    return 1;
  }
  return 0;
}

// ------------------------------------------------------------ mode-evolve --

struct ModeEvolveArgs {
  int k = 0;
  double dt = -1.0, t_final = -1.0;
  bool project_kernel = false;
  std::string params_path, out_dir;
};

int cmd_mode_evolve(const ModeEvolveArgs& a) {
  RunConfig cfg = load_cfg(a.params_path);
  if (a.dt >= 0.0) cfg.dt = a.dt;
  if (a.t_final > 0.0) cfg.t_final = a.t_final;
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  cfg.validate();
  const double dt = cfg.dt > 0.0 ? cfg.dt : 1e-3;

  const int n = cfg.n_inner;
  const ModeOperator op =
      assemble_mode_operator(cfg.params, a.k, n, cfg.n_outer, cfg.stokes_n);

  // random admissible initial state, reproducible from the config seed
  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ModeState s;
  s.k = a.k;
  s.mu_plus = Eigen::VectorXcd::Zero(n);
  s.mu_minus = Eigen::VectorXcd::Zero(cfg.n_outer);
  for (int i = 0; i < n; ++i) s.mu_plus[i] = uni(rng);
  for (int i = 0; i < cfg.n_outer; ++i) s.mu_minus[i] = uni(rng);
  if (a.k != 0) s.mu_plus[0] = 0.0;
  s.rho = 0.4;
  const ModeState adm = op.make_admissible(s);

  const ModeEvolution ev = linear_mode_evolve(op, adm, dt, cfg.t_final,
                                              cfg.sample_every, a.project_kernel);

  const auto dir = prepare_out_dir(cfg.out_dir);
  auto csv = open_output(dir / "mode_norms.csv");
  csv << metadata_line(cfg) << "t,norm\n";
  for (std::size_t i = 0; i < ev.times.size(); ++i)
    csv << dtos(ev.times[i]) << "," << dtos(ev.norms[i]) << "\n";
  return 0;
}

// ------------------------------------------------------------ equilibrium --

struct EquilibriumArgs {
  double m_plus = 0.0, m_minus = 0.0, rc = 2.0;
  std::string out_path;
};

int cmd_equilibrium(const EquilibriumArgs& a) {
  const EquilibriumScan scan = find_equilibrium(a.m_plus, a.m_minus, a.rc);
  RunConfig cfg;
  cfg.params.R_container = a.rc;
  json j = base_record(cfg);
  j["M_plus"] = a.m_plus;
  j["M_minus"] = a.m_minus;
  j["R_container"] = a.rc;
  j["found"] = scan.found();
  json roots = json::array();
  for (const auto& r : scan.roots)
    roots.push_back({{"R_star", r.R_star},
                     {"c_plus", r.c_plus},
                     {"c_minus", r.c_minus}});
  j["roots"] = std::move(roots);
  emit_json(j, a.out_path);
  return 0;
}

// ------------------------------------------------------------- verify-all --

struct VerifyAllArgs {
  std::string params_path, out_dir;
  std::vector<std::string> only;
};

int cmd_verify_all(const VerifyAllArgs& a) {
  RunConfig cfg = load_cfg(a.params_path);
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  cfg.validate();

  const VerifyReport rep = run_acceptance(cfg, &std::cerr, a.only);
  const json j = to_json(rep, cfg);

  const auto dir = prepare_out_dir(cfg.out_dir);
  {
    auto out = open_output(dir / "verify_report.json");
    out << j.dump(2) << "\n";
  }
  std::cout << j.dump(2) << "\n";
  return rep.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osmoflow: two-phase Stokes-osmosis toolkit (membrane drop in a container)"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  StokesArgs st;
  auto* sp_st = app.add_subcommand(
      "stokes", "Solve one angular mode of the interface Stokes problem");
  // long-only help here: the automatic -h short flag would shadow --h
  sp_st->set_help_flag("--help", "print this help message and exit");
  sp_st->add_option("--k", st.k, "angular mode number")->required();
  sp_st->add_option("--h", st.h_normal,
                    "normal traction jump amplitude (default: m - k^2)");
  sp_st->add_option("--ht", st.h_tangent, "tangential traction jump amplitude");
  sp_st->add_option("--n", st.n, "collocation nodes per phase (default: config)");
  sp_st->add_option("--params", st.params_path, "TOML configuration file");
  sp_st->add_option("--out", st.out_path, "write the JSON record to this file");

  VerifyLsArgs ls;
  auto* sp_ls = app.add_subcommand(
      "verify-ls", "Check the flat-interface Lopatinskii-Shapiro determinant");
  sp_ls->add_option("--nu+", ls.nu_plus, "drop-phase viscosity");
  sp_ls->add_option("--nu-", ls.nu_minus, "shell-phase viscosity");
  sp_ls->add_option("--xi", ls.xi, "tangential frequencies to sample")
      ->expected(-1);
  sp_ls->add_option("--out", ls.out_path, "write the JSON record to this file");

  SpectrumArgs sp;
  auto* sp_sp = app.add_subcommand(
      "spectrum", "Spectrum of the linearized generator, modes |k| <= kmax");
  sp_sp->add_option("--kmax", sp.k_max, "largest angular mode (default: config)");
  sp_sp->add_option("--n", sp.n, "vertex nodes per phase (default: config)");
  sp_sp->add_option("--params", sp.params_path, "TOML configuration file");
  sp_sp->add_option("--out", sp.out_dir, "output directory for spectrum.csv");
  sp_sp->add_option("--json", sp.out_path, "write the JSON report to this file");

  SimulateArgs sim;
  auto* sp_sim = app.add_subcommand(
      "simulate", "Nonlinear radially symmetric evolution from a state file");
  sp_sim->add_option("--init", sim.init_path, "initial state JSON")->required();
  sp_sim->add_option("--dt", sim.dt, "time step (0: automatic)");
  sp_sim->add_option("--tfinal", sim.t_final, "final time");
  sp_sim->add_option("--sample-every", sim.sample_every, "steps between samples");
  sp_sim->add_option("--params", sim.params_path, "TOML configuration file");
  sp_sim->add_option("--out", sim.out_dir, "output directory");

  ModeEvolveArgs me;
  auto* sp_me = app.add_subcommand(
      "mode-evolve",
      "Evolve one linear mode from a seeded random admissible state");
  sp_me->add_option("--k", me.k, "angular mode number")->required();
  sp_me->add_option("--dt", me.dt, "time step (default: config, else 1e-3)");
  sp_me->add_option("--tfinal", me.t_final, "final time");
  sp_me->add_flag("--project-kernel", me.project_kernel,
                  "remove the kernel component before evolving");
  sp_me->add_option("--params", me.params_path, "TOML configuration file");
  sp_me->add_option("--out", me.out_dir, "output directory");

  EquilibriumArgs eq;
  auto* sp_eq = app.add_subcommand(
      "equilibrium", "Spherical equilibria for given phase masses");
  sp_eq->add_option("--m+", eq.m_plus, "drop-phase solute mass")->required();
  sp_eq->add_option("--m-", eq.m_minus, "shell-phase solute mass")->required();
  sp_eq->add_option("--rc", eq.rc, "container radius");
  sp_eq->add_option("--out", eq.out_path, "write the JSON record to this file");

  VerifyAllArgs va;
  auto* sp_va = app.add_subcommand(
      "verify-all", "Run the acceptance battery and emit a JSON report");
  sp_va->add_option("--params", va.params_path, "TOML configuration file");
  sp_va->add_option("--only", va.only, "run only the named criteria")
      ->expected(-1);
  sp_va->add_option("--out", va.out_dir, "output directory for verify_report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version succeed; usage errors -> 2
  }

  try {
    if (sp_st->parsed()) return cmd_stokes(st);
    if (sp_ls->parsed()) return cmd_verify_ls(ls);
    if (sp_sp->parsed()) return cmd_spectrum(sp);
    if (sp_sim->parsed()) return cmd_simulate(sim);
    if (sp_me->parsed()) return cmd_mode_evolve(me);
    if (sp_eq->parsed()) return cmd_equilibrium(eq);
    if (sp_va->parsed()) return cmd_verify_all(va);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
