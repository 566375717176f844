// maopt command line: run, sweep, diagnose-connectivity.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maopt/harness.hpp"

namespace {

using namespace maopt;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

// Options shared by run and sweep. Raw strings are kept so a config file can
// be applied first and the flags that were actually given win afterwards.
struct RunFlags {
  std::string config_path;
  std::string case_name;
  std::string scheme;
  std::size_t trials = 0;
  double panel = 0.0;
  std::size_t n_tx = 0;
  std::size_t n_rx = 0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  bool trace = false;
  std::size_t jobs = 0;
  std::size_t paths = 0;
  double d_min = 0.0;
  std::string as_mode;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--config", f.config_path, "key = value config file (flags override it)");
  app->add_option("--case", f.case_name, "capacity | mec | rzf");
  app->add_option("--scheme", f.scheme, "proposed | fpa | as | pso");
  app->add_option("--trials", f.trials, "Monte-Carlo trials");
  app->add_option("--panel", f.panel, "panel side in wavelengths");
  app->add_option("--n-tx", f.n_tx, "N");
  app->add_option("--n-rx", f.n_rx, "M");
  app->add_option("--snr-db", f.snr_db, "P / sigma^2 in dB");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--out", f.out, "result file (.csv or .jsonl)");
  app->add_flag("--trace", f.trace, "write per-trial convergence traces");
  app->add_option("--jobs", f.jobs, "worker threads");
  app->add_option("--paths", f.paths, "propagation paths L");
  app->add_option("--d-min", f.d_min, "minimum antenna spacing in wavelengths");
  app->add_option("--as-mode", f.as_mode, "alternating | joint");
}

RunConfig build_config(CLI::App* app, const RunFlags& f) {
  RunConfig c;
  if (!f.config_path.empty()) {
    for (const auto& [k, v] : read_config_file(f.config_path)) apply_config_value(c, k, v);
  }
  auto given = [&](const char* name) { return app->count(name) > 0; };
  if (given("--case")) c.case_kind = parse_case(f.case_name);
  if (given("--scheme")) c.scheme = parse_scheme(f.scheme);
  if (given("--trials")) c.trials = f.trials;
  if (given("--panel")) c.settings.panel = f.panel;
  if (given("--n-tx")) c.settings.n_tx = f.n_tx;
  if (given("--n-rx")) c.settings.n_rx = f.n_rx;
  if (given("--snr-db")) c.settings.snr_db = f.snr_db;
  if (given("--seed")) c.seed = f.seed;
  if (given("--out")) c.out_path = f.out;
  if (given("--trace")) c.trace = f.trace;
  if (given("--jobs")) c.jobs = f.jobs;
  if (given("--paths")) c.settings.num_paths = f.paths;
  if (given("--d-min")) c.settings.d_min = f.d_min;
  if (given("--as-mode")) apply_config_value(c, "as_mode", f.as_mode);
  return c;
}

void print_summary(const std::string& label, const Summary& s) {
  std::printf("%s trials=%zu mean=%.6g se=%.3g feasible=%.3f\n", label.c_str(), s.trials, s.mean,
              s.std_error, s.feasible_rate);
}

int cmd_run(CLI::App* app, const RunFlags& f) {
  RunConfig c = build_config(app, f);
  c.validate();
  if (c.out_path.empty()) throw ConfigError("out: an output path is required");
  const auto res = run_monte_carlo(c);
  emit_results(res.records, format_for_path(c.out_path), c.out_path);
  if (c.trace) emit_traces(res.records, c.out_path);
  print_summary(to_string(c.case_kind) + "/" + to_string(c.scheme), res.summary);
  return 0;
}

int cmd_sweep(CLI::App* app, const RunFlags& f, const std::string& param,
              const std::string& values) {
  RunConfig c = build_config(app, f);
  const SweepParam p = parse_sweep_param(param);
  const auto list = parse_value_list(values);
  const auto rows = run_sweep(c, p, list);
  const std::string text = format_sweep(rows);
  if (!c.out_path.empty()) write_text_file(c.out_path, text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna position optimization experiments"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Monte-Carlo run of one case and scheme");
  add_run_flags(run, run_flags);

  RunFlags sweep_flags;
  std::string sweep_param;
  std::string sweep_values;
  auto* sweep = app.add_subcommand("sweep", "one summary row per parameter value");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--param", sweep_param, "panel | antennas")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();

  ConnectivityConfig conn;
  std::string conn_case = "capacity";
  std::string conn_out;
  auto* diag = app.add_subcommand("diagnose-connectivity",
                                  "count unconnected feasible regions during sequential updates");
  diag->add_option("--case", conn_case, "capacity | mec | rzf");
  diag->add_option("--trials", conn.trials);
  diag->add_option("--panel", conn.panel);
  diag->add_option("--antennas", conn.antennas);
  diag->add_option("--resolution", conn.resolution, "raster cell in wavelengths");
  diag->add_option("--d-min", conn.d_min);
  diag->add_option("--sweeps", conn.sweeps);
  diag->add_option("--seed", conn.seed);
  diag->add_option("--jobs", conn.jobs);
  diag->add_option("--probe-stride", conn.probe_stride, "objective sampling stride in raster cells");
  diag->add_option("--out", conn_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run, run_flags);
    if (*sweep) return cmd_sweep(sweep, sweep_flags, sweep_param, sweep_values);
    if (*diag) {
      conn.case_kind = parse_case(conn_case);
      const auto res = diagnose_connectivity(conn);
      if (!conn_out.empty()) write_text_file(conn_out, format_connectivity(res));
      std::printf("impacted_fraction=%.4f trapped_fraction=%.4f trials=%zu\n", res.impacted_fraction,
                  res.trapped_fraction, res.trials.size());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
