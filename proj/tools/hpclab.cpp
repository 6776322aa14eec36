// hpclab: batch driver for symbol analysis, simulations, decay studies,
// relaxation sweeps and Lyapunov checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hpclab/diagnostics/damped_modes.hpp"
#include "hpclab/diagnostics/lyapunov.hpp"
#include "hpclab/diagnostics/relaxation.hpp"
#include "hpclab/hpc/initial_data.hpp"
#include "hpclab/io/config.hpp"
#include "hpclab/io/series_io.hpp"
#include "hpclab/io/setup.hpp"
#include "hpclab/ks/solver.hpp"
#include "hpclab/linear/decay_study.hpp"
#include "hpclab/linear/symbol.hpp"
#include "hpclab/spectral/snapshot_io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hpclab;

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kBlowUp = 2, kCriterion = 3, kInternal = 4 };

struct Run {
  std::string command;
  std::string config_path;
  fs::path out;
  long seed = 0;
  int threads = 1;
  io::Config config;
};

/// Numbers that JSON cannot hold become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) return {};
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json params_json(const model::ModelParams& p) {
  return {{"eps", p.epsilon()},
          {"mu", p.mu()},
          {"a", p.a()},
          {"b", p.b()},
          {"rho_bar", p.rho_bar()},
          {"pressure", p.pressure().describe()},
          {"c0", p.c0()},
          {"c1", p.c1()},
          {"phi_bar", p.phi_bar()},
          {"stability_margin", p.stability_margin()},
          {"threshold_offset", p.threshold_offset()}};
}

void write_snapshots(const fs::path& dir, const std::vector<spectral::Snapshot>& snaps) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05zu.bin", k);
    spectral::write_snapshot((dir / name).string(), snaps[k]);
  }
}

int report_blowup(const Run& run, double t, const std::string& reason) {
  const fs::path path = run.out / "blowup.json";
  write_json(path, {{"blew_up", true}, {"time", t}, {"reason", reason}});
  std::cerr << "blow-up at t = " << t << ": " << reason << "\nreport: " << path.string() << '\n';
  return kBlowUp;
}

int cmd_analyze_symbol(Run& run) {
  const auto& c = run.config;
  const auto p = io::params_from(c);
  const double xi_max = c.get_double("scan.xi_max", 20.0);
  const int samples = c.get_int("scan.samples", 1000);
  c.reject_unused();

  const auto scan = linear::stability_scan(p, xi_max, samples);
  io::write_eigen_scan_csv((run.out / "eigen_scan.csv").string(), scan);

  const double eps = p.epsilon();
  const auto low = linear::lowfreq_asymptotic_check(p, {1e-2 / eps, 1e-3 / eps});
  {
    io::CsvWriter w((run.out / "lowfreq.csv").string(), {"xi", "eps_xi", "ratio1", "ratio2", "ratio3", "all_real"});
    for (const auto& r : low) w.row(r.xi, eps * r.xi, r.ratio1, r.ratio2, r.ratio3, r.all_real ? 1 : 0);
  }
  const auto high = linear::highfreq_asymptotic_check(p, {1e2 / eps, 1e3 / eps});
  {
    io::CsvWriter w((run.out / "highfreq.csv").string(), {"xi", "eps_xi", "re_ratio", "im_ratio", "ratio3"});
    for (const auto& r : high) w.row(r.xi, eps * r.xi, r.re_ratio, r.im_ratio, r.ratio3);
  }

  const auto verdict = model::check_stability(p);
  json s = {{"params", params_json(p)},
            {"verdict", verdict.stable ? "stable" : "unstable"},
            {"margin", verdict.margin},
            {"scan_max_real", scan.max_real},
            {"scan_argmax_xi", scan.argmax_xi},
            {"scan_max_positive_real_root", num(scan.max_positive_real_root)}};
  if (!verdict.stable) s["unstable_band"] = {0.0, linear::unstable_band_edge(p)};
  write_json(run.out / "summary.json", s);

  std::cout << "verdict: " << (verdict.stable ? "stable" : "unstable") << "  margin: " << verdict.margin << '\n';
  if (!verdict.stable) std::cout << "unstable band: [0, " << linear::unstable_band_edge(p) << ")\n";
  std::cout << "max Re lambda over scan: " << scan.max_real << " at |xi| = " << scan.argmax_xi << '\n';
  return kOk;
}

int cmd_simulate_hpc(Run& run) {
  const auto& c = run.config;
  const auto p = io::params_from(c);
  const auto g = io::grid_from(c);
  const auto sc = io::solver_from(c);
  const auto prof = io::profile_from(c);
  c.reject_unused();

  const auto init = hpc::build_initial_data(prof, p, g);
  const hpc::HpcSolver solver(p, g, sc);
  const auto traj = solver.run(init.state);

  std::vector<spectral::Snapshot> snaps;
  for (const auto& s : traj.snapshots) snaps.push_back(s.snapshot());
  write_snapshots(run.out / "snapshots", snaps);
  io::write_series_csv((run.out / "series.csv").string(), traj.series);

  double agg_max = 0.0;
  for (const auto& r : traj.series) agg_max = std::max(agg_max, r.aggregate);
  const auto& first = traj.series.front();
  const auto& last = traj.series.back();
  const double span = last.t - first.t;
  json s = {{"params", params_json(p)},
            {"X0", init.breakdown.aggregate},
            {"initial_scale", init.scale},
            {"aggregate_max", agg_max},
            {"aggregate_final", last.aggregate},
            {"t_final", last.t},
            {"mass_drift_per_time", span > 0.0 ? std::abs(last.mass - first.mass) / std::abs(first.mass) / span : 0.0},
            {"snapshots", snaps.size()},
            {"blew_up", traj.blew_up}};
  if (!traj.blew_up && !traj.snapshots.empty()) {
    const auto dm = diagnostics::damped_mode_decay_check(traj.snapshots);
    s["damped_velocity_integral"] = dm.velocity_integral;
    s["damped_concentration_integral"] = dm.concentration_integral;
    s["damped_within_bound"] = dm.within_bound;
  }
  write_json(run.out / "summary.json", s);
  if (traj.blew_up) return report_blowup(run, traj.blowup_time, traj.blowup_reason);
  std::cout << "X0 = " << init.breakdown.aggregate << ", max aggregate = " << agg_max << ", t = " << last.t << '\n';
  return kOk;
}

int cmd_simulate_ks(Run& run) {
  const auto& c = run.config;
  const auto p = io::params_from(c);
  const auto g = io::grid_from(c);
  const auto sc = io::solver_from(c);
  const double amplitude = c.get_double("ks.amplitude", 0.05);
  const double width = c.get_double("ks.width", 1.0);
  c.reject_unused();
  if (!(width > 0.0)) throw io::ConfigError("ks.width must be positive");

  const ks::KsSolver solver(p, g, sc);
  ks::KsState init = solver.make_state();
  init.rho = diagnostics::relaxation_density(g, p, amplitude, width);
  const auto traj = solver.run(init);

  std::vector<spectral::Snapshot> snaps;
  for (const auto& s : traj.snapshots) snaps.push_back(s.snapshot());
  write_snapshots(run.out / "snapshots", snaps);
  io::write_ks_series_csv((run.out / "ks_series.csv").string(), traj.series);
  const auto& last = traj.series.back();
  write_json(run.out / "summary.json", {{"params", params_json(p)},
                                        {"amplitude", amplitude},
                                        {"width", width},
                                        {"tau_final", last.tau},
                                        {"besov_low_final", last.low},
                                        {"mass_initial", traj.series.front().mass},
                                        {"mass_final", last.mass},
                                        {"blew_up", traj.blew_up}});
  if (traj.blew_up) return report_blowup(run, traj.blowup_time, traj.blowup_reason);
  std::cout << "tau = " << last.tau << ", ||rho - rho_bar|| = " << last.low << '\n';
  return kOk;
}

int cmd_decay_study(Run& run) {
  const auto& c = run.config;
  const auto p = io::params_from(c);
  const auto dims = c.get_list("decay.dims", {1.0, 2.0});
  const bool damped_row = c.get_bool("decay.damped_row", true);
  const double width = c.get_double("decay.width", 1.0);
  const double tol = c.get_double("decay.tolerance", 0.10);
  const double damped_tol = c.get_double("decay.damped_tolerance", 0.15);
  std::vector<linear::DecayStudyConfig> rows;
  for (double d : dims) {
    const int dim = static_cast<int>(d);
    if (dim != d) throw io::ConfigError("decay.dims entries must be integers");
    auto full = io::decay_from(c, dim);
    full.quantity = linear::DecayQuantity::full;
    rows.push_back(full);
    if (damped_row) {
      auto damped = full;
      damped.quantity = linear::DecayQuantity::damped;
      damped.sigma = damped.sigma0 + 1.0;
      try {
        linear::validate(damped);
      } catch (const std::invalid_argument& e) {
        throw io::ConfigError(std::string("decay damped row: ") + e.what());
      }
      rows.push_back(damped);
    }
  }
  c.reject_unused();
  if (!(width > 0.0)) throw io::ConfigError("decay.width must be positive");

  io::CsvWriter table((run.out / "decay_table.csv").string(),
                      {"d", "quantity", "sigma0", "sigma", "fitted_slope", "predicted_slope", "relative_gap"});
  json out = json::array();
  bool ok = true;
  for (const auto& cfg : rows) {
    const auto res = linear::semigroup_decay_study(p, cfg, linear::gaussian_profile(width, p));
    const bool damped = cfg.quantity == linear::DecayQuantity::damped;
    const char* q = damped ? "damped" : "full";
    const double gap = (res.slope - res.predicted_slope) / std::abs(res.predicted_slope);
    const bool pass = std::abs(gap) <= (damped ? damped_tol : tol);
    ok = ok && pass;
    table.row(cfg.dim, q, cfg.sigma0, cfg.sigma, res.slope, res.predicted_slope, gap);
    io::write_decay_csv((run.out / ("decay_d" + std::to_string(cfg.dim) + "_" + q + ".csv")).string(), res);
    out.push_back({{"d", cfg.dim},
                   {"quantity", q},
                   {"sigma0", cfg.sigma0},
                   {"sigma", cfg.sigma},
                   {"fitted_slope", res.slope},
                   {"predicted_slope", res.predicted_slope},
                   {"relative_gap", gap},
                   {"fit_residual", res.fit_residual},
                   {"quadrature_error", res.quadrature_error},
                   {"within_tolerance", pass}});
    std::printf("d=%d %-6s sigma0=%+.2f sigma=%+.2f fitted %+.4f predicted %+.4f gap %+.3f %s\n", cfg.dim, q,
                cfg.sigma0, cfg.sigma, res.slope, res.predicted_slope, gap, pass ? "ok" : "OUTSIDE");
  }
  write_json(run.out / "summary.json", {{"params", params_json(p)}, {"rows", out}, {"all_within_tolerance", ok}});
  return ok ? kOk : kCriterion;
}

int cmd_relaxation_sweep(Run& run) {
  const auto& c = run.config;
  const auto p = io::params_from(c);
  const auto g = io::grid_from(c);
  auto rc = io::relaxation_from(c);
  rc.threads = run.threads;
  c.reject_unused();

  const auto rho0 = diagnostics::relaxation_density(g, p, rc.amplitude, rc.width);
  const auto rep = diagnostics::relaxation_sweep(rho0, p, rc);
  io::write_relaxation_csv((run.out / "relaxation.csv").string(), rep);

  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"eps", r.eps},
                    {"sup_drho", r.sup_drho},
                    {"int_du", r.int_du},
                    {"flux_over_eps", r.int_flux / r.eps},
                    {"psi_rate_over_eps", r.int_psi_rate / r.eps}});
  }
  const double flux_spread = diagnostics::spread_over_eps(rep, &diagnostics::RelaxationRow::int_flux);
  const double rate_spread = diagnostics::spread_over_eps(rep, &diagnostics::RelaxationRow::int_psi_rate);
  write_json(run.out / "summary.json", {{"params", params_json(p)},
                                        {"rows", rows},
                                        {"slope_sup_drho", rep.slope_sup_drho},
                                        {"slope_int_drho", rep.slope_int_drho},
                                        {"slope_int_du", rep.slope_int_du},
                                        {"slope_int_dphi", rep.slope_int_dphi},
                                        {"slope_int_flux", rep.slope_int_flux},
                                        {"slope_int_elliptic", rep.slope_int_elliptic},
                                        {"slope_window", {rc.slope_lo, rc.slope_hi}},
                                        {"slopes_in_window", rep.slopes_in_window},
                                        {"flux_over_eps_spread", flux_spread},
                                        {"psi_rate_over_eps_spread", rate_spread}});
  std::printf("slope sup ||d rho|| = %.4f, slope int ||d u|| = %.4f, window [%.2f, %.2f]: %s\n", rep.slope_sup_drho,
              rep.slope_int_du, rc.slope_lo, rc.slope_hi, rep.slopes_in_window ? "inside" : "OUTSIDE");
  std::printf("spread of int ||rho v|| / eps = %.3f, of int ||d_t psi|| / eps = %.3f\n", flux_spread, rate_spread);
  return rep.slopes_in_window ? kOk : kCriterion;
}

int cmd_lyapunov_check(Run& run) {
  const auto& c = run.config;
  const auto p = io::params_from(c);
  const auto g = io::grid_from(c);
  const auto sc = io::solver_from(c);
  const auto prof = io::profile_from(c);
  const double eta0 = c.get_double("lyap.eta0", 0.1);
  const double c_tol = c.get_double("lyap.c_tol", 10.0);
  const double floor = c.get_double("lyap.noise_floor", 1e-20);
  const auto k_scan = c.get_list("lyap.k_scan", {-3.0, -2.0, -1.0, 0.0});
  c.reject_unused();
  if (!(eta0 > 0.0 && eta0 < 1.0)) throw io::ConfigError("lyap.eta0 must lie in (0, 1)");

  const auto init = hpc::build_initial_data(prof, p, g);
  const auto traj = hpc::HpcSolver(p, g, sc).run(init.state);
  if (traj.blew_up) return report_blowup(run, traj.blowup_time, traj.blowup_reason);

  const auto rep = diagnostics::lyapunov_equivalence_check(traj.snapshots, eta0, c_tol, floor);
  io::write_lyapunov_csv((run.out / "lyapunov.csv").string(), rep, p.epsilon());

  json sens = json::array();
  for (double kd : k_scan) {
    const int k = static_cast<int>(kd);
    auto snaps = traj.snapshots;
    for (auto& s : snaps) s.params = p.with_threshold_offset(k);
    const auto r = diagnostics::lyapunov_equivalence_check(snaps, eta0, c_tol, floor);
    sens.push_back({{"k", k},
                    {"j_lo", r.j_lo},
                    {"checked", r.checked},
                    {"skipped", r.skipped},
                    {"violations", r.violations.size()},
                    {"ratio2_min", num(r.ratio2_min)}});
  }
  write_json(run.out / "summary.json", {{"params", params_json(p)},
                                        {"eta0", eta0},
                                        {"c_tol", c_tol},
                                        {"noise_floor", floor},
                                        {"j_lo", rep.j_lo},
                                        {"j_hi", rep.j_hi},
                                        {"checked", rep.checked},
                                        {"skipped", rep.skipped},
                                        {"violations", rep.violations.size()},
                                        {"ratio1_min", num(rep.ratio1_min)},
                                        {"ratio1_max", num(rep.ratio1_max)},
                                        {"ratio2_min", num(rep.ratio2_min)},
                                        {"threshold_sensitivity", sens}});
  std::printf("j in [%d, %d]: %zu blocks checked, %zu skipped, %zu violations\n", rep.j_lo, rep.j_hi, rep.checked,
              rep.skipped, rep.violations.size());
  return rep.passed() ? kOk : kCriterion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hpclab: damped chemotaxis laboratory"};
  app.require_subcommand(1);
  Run run;
  std::string out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", run.config_path, "flat key = value config file")->required();
    sub->add_option("--out", out, "output directory (default out/<command>)");
    sub->add_option("--seed", run.seed, "recorded in the manifest; every command is deterministic");
    sub->add_option("--threads", run.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"analyze-symbol", "eigenvalue scan, asymptotic ratios and stability verdict"},
      {"simulate-hpc", "run the damped system and write snapshots and series"},
      {"simulate-ks", "run the parabolic-elliptic limit"},
      {"decay-study", "linear semigroup decay exponents"},
      {"relaxation-sweep", "relaxation error versus eps"},
      {"lyapunov-check", "block Lyapunov equivalence along a trajectory"}};
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help));
  CLI11_PARSE(app, argc, argv);
  run.command = app.get_subcommands().front()->get_name();
  run.out = out.empty() ? fs::path("out") / run.command : fs::path(out);

  try {
    fs::create_directories(run.out);
  } catch (const std::exception& e) {
    std::cerr << "cannot create output directory: " << e.what() << '\n';
    return kConfig;
  }
  json manifest = {{"command", run.command},
                   {"config_path", run.config_path},
                   {"config_text", slurp(run.config_path)},
                   {"seed", run.seed},
                   {"threads", run.threads}};
  try {
    run.config = io::Config::load(run.config_path);
    manifest["config"] = run.config.values();
    write_json(run.out / "manifest.json", manifest);
  } catch (const io::ConfigError& e) {
    manifest["config_error"] = e.what();
    write_json(run.out / "manifest.json", manifest);
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (run.command == "analyze-symbol") return cmd_analyze_symbol(run);
    if (run.command == "simulate-hpc") return cmd_simulate_hpc(run);
    if (run.command == "simulate-ks") return cmd_simulate_ks(run);
    if (run.command == "decay-study") return cmd_decay_study(run);
    if (run.command == "relaxation-sweep") return cmd_relaxation_sweep(run);
    if (run.command == "lyapunov-check") return cmd_lyapunov_check(run);
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const WindowViolation& e) {
    return report_blowup(run, std::nan(""), e.what());
  } catch (const BlowUp& e) {
    return report_blowup(run, std::nan(""), e.what());
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
