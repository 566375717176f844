#include "maopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "maopt/capacity.hpp"
#include "maopt/mec.hpp"
#include "maopt/rzf.hpp"

namespace maopt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-' || value[0] == '+') {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  try {
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + value + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(CaseKind c) {
  switch (c) {
    case CaseKind::Capacity: return "capacity";
    case CaseKind::Mec: return "mec";
    case CaseKind::Rzf: return "rzf";
  }
  return "?";
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Fpa: return "fpa";
    case Scheme::As: return "as";
    case Scheme::Pso: return "pso";
  }
  return "?";
}

CaseKind parse_case(const std::string& s) {
  if (s == "capacity") return CaseKind::Capacity;
  if (s == "mec") return CaseKind::Mec;
  if (s == "rzf") return CaseKind::Rzf;
  throw ConfigError("case: expected capacity, mec or rzf, got '" + s + "'");
}

Scheme parse_scheme(const std::string& s) {
  if (s == "proposed") return Scheme::Proposed;
  if (s == "fpa") return Scheme::Fpa;
  if (s == "as") return Scheme::As;
  if (s == "pso") return Scheme::Pso;
  throw ConfigError("scheme: expected proposed, fpa, as or pso, got '" + s + "'");
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "jsonl") return OutputFormat::Jsonl;
  throw ConfigError("format: expected csv or jsonl, got '" + s + "'");
}

OutputFormat format_for_path(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return (ext == ".jsonl" || ext == ".json") ? OutputFormat::Jsonl : OutputFormat::Csv;
}

void RunConfig::validate() const {
  const auto& s = settings;
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  if (!(s.panel > 0.0) || !std::isfinite(s.panel)) throw ConfigError("panel: must be a positive length");
  if (s.n_tx < 1) throw ConfigError("n_tx: must be >= 1");
  if (s.n_rx < 1) throw ConfigError("n_rx: must be >= 1");
  if (s.num_paths < 1) throw ConfigError("paths: must be >= 1");
  if (!(s.kappa >= 0.0)) throw ConfigError("kappa: must be >= 0");
  if (!std::isfinite(s.snr_db)) throw ConfigError("snr_db: must be finite");
  if (!(s.sigma2 > 0.0)) throw ConfigError("sigma2: must be positive");
  if (!(s.d_min > 0.0) || !std::isfinite(s.d_min)) throw ConfigError("d_min: must be positive");
  if (!(s.schedule.rho_init > 0.0)) throw ConfigError("rho_init: must be positive");
  if (!(s.schedule.growth > 1.0)) throw ConfigError("rho_growth: must be > 1");
  if (!(s.stop.rel_change_tol > 0.0)) throw ConfigError("rel_tol: must be positive");
  if (!(s.stop.residual_tol > 0.0)) throw ConfigError("residual_tol: must be positive");
  if (s.stop.max_outer_iters < 1) throw ConfigError("max_outer: must be >= 1");
  if (!(s.pgd.step0 > 0.0)) throw ConfigError("pgd_step0: must be positive");
  if (jobs < 1) throw ConfigError("jobs: must be >= 1");
  if (case_kind == CaseKind::Mec) {
    if (s.n_rx < s.n_tx) throw ConfigError("n_rx: zero forcing needs n_rx >= n_tx for the mec case");
    if (!(s.bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz: must be positive");
    if (!(s.f_server_hz > 0.0)) throw ConfigError("f_server_hz: must be positive");
    if (!(s.f_local_min_hz > 0.0) || !(s.f_local_max_hz >= s.f_local_min_hz)) {
      throw ConfigError("f_local_min_hz: need 0 < f_local_min_hz <= f_local_max_hz");
    }
  }
  if (scheme == Scheme::As) {
    const std::size_t biggest = std::max(s.n_tx, s.n_rx);
    if (biggest > 10) throw ConfigError("scheme: antenna selection supports at most 10 antennas per side");
    if (selection.rounds < 1) throw ConfigError("as_rounds: must be >= 1");
  }
  if (scheme == Scheme::Pso) {
    try {
      pso.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("pso: ") + e.what());
    }
  }
}

void apply_config_value(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto& s = c.settings;
  if (key == "case") c.case_kind = parse_case(v);
  else if (key == "scheme") c.scheme = parse_scheme(v);
  else if (key == "trials") c.trials = parse_unsigned(key, v);
  else if (key == "seed") c.seed = parse_unsigned(key, v);
  else if (key == "panel") s.panel = parse_double(key, v);
  else if (key == "n_tx") s.n_tx = parse_unsigned(key, v);
  else if (key == "n_rx") s.n_rx = parse_unsigned(key, v);
  else if (key == "paths") s.num_paths = parse_unsigned(key, v);
  else if (key == "kappa") s.kappa = parse_double(key, v);
  else if (key == "snr_db") s.snr_db = parse_double(key, v);
  else if (key == "sigma2") s.sigma2 = parse_double(key, v);
  else if (key == "d_min") s.d_min = parse_double(key, v);
  else if (key == "rho_init") s.schedule.rho_init = parse_double(key, v);
  else if (key == "rho_growth") s.schedule.growth = parse_double(key, v);
  else if (key == "rel_tol") s.stop.rel_change_tol = parse_double(key, v);
  else if (key == "max_outer") s.stop.max_outer_iters = parse_unsigned(key, v);
  else if (key == "residual_tol") s.stop.residual_tol = parse_double(key, v);
  else if (key == "pgd_step0") s.pgd.step0 = parse_double(key, v);
  else if (key == "pgd_max_iters") s.pgd.max_iters = parse_unsigned(key, v);
  else if (key == "bandwidth_hz") s.bandwidth_hz = parse_double(key, v);
  else if (key == "f_server_hz") s.f_server_hz = parse_double(key, v);
  else if (key == "f_local_min_hz") s.f_local_min_hz = parse_double(key, v);
  else if (key == "f_local_max_hz") s.f_local_max_hz = parse_double(key, v);
  else if (key == "cycles_local") s.cycles_per_bit_local = parse_double(key, v);
  else if (key == "cycles_server") s.cycles_per_bit_server = parse_double(key, v);
  else if (key == "result_ratio") s.result_ratio = parse_double(key, v);
  else if (key == "bits_per_local_hz") s.bits_per_local_hz = parse_double(key, v);
  else if (key == "user_spacing") s.user_spacing = parse_double(key, v);
  else if (key == "rzf_alpha") s.rzf_alpha = parse_double(key, v);
  else if (key == "pso_swarm") c.pso.swarm = parse_unsigned(key, v);
  else if (key == "pso_iterations") c.pso.iterations = parse_unsigned(key, v);
  else if (key == "pso_inertia") c.pso.inertia = parse_double(key, v);
  else if (key == "pso_cognitive") c.pso.cognitive = parse_double(key, v);
  else if (key == "pso_social") c.pso.social = parse_double(key, v);
  else if (key == "pso_penalty_scale") c.pso.penalty_scale = parse_double(key, v);
  else if (key == "as_mode") {
    if (v == "alternating") c.selection.mode = SelectionMode::Alternating;
    else if (v == "joint") c.selection.mode = SelectionMode::Joint;
    else throw ConfigError("as_mode: expected alternating or joint, got '" + v + "'");
  } else if (key == "as_rounds") c.selection.rounds = static_cast<int>(parse_unsigned(key, v));
  else if (key == "out") c.out_path = v;
  else if (key == "trace") c.trace = parse_bool(key, v);
  else if (key == "jobs") c.jobs = parse_unsigned(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t child_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(master ^ splitmix64(trial + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t channel_stream_seed(std::uint64_t child) { return splitmix64(child ^ 0x6368616eULL); }
std::uint64_t algorithm_stream_seed(std::uint64_t child) { return splitmix64(child ^ 0x616c676fULL); }

bool operator==(const TrialRecord& a, const TrialRecord& b) {
  auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
  return a.trial == b.trial && a.seed == b.seed && a.case_name == b.case_name &&
         a.scheme == b.scheme && same(a.a_lambda, b.a_lambda) && a.n == b.n && a.m == b.m &&
         same(a.metric, b.metric) && a.iters == b.iters && same(a.rho_final, b.rho_final) &&
         same(a.resid, b.resid) && same(a.min_dist, b.min_dist) && same(a.t_ms, b.t_ms);
}

bool record_feasible(const TrialRecord& r, double d_min) { return r.min_dist >= d_min - 1e-6; }

namespace {

template <class Problem, class Solve>
CaseOutcome dispatch(Problem& problem, const RunConfig& c, Rng& algo, Solve solve) {
  switch (c.scheme) {
    case Scheme::Proposed: return solve(problem, c.settings, algo);
    case Scheme::Fpa: return run_fpa(problem);
    case Scheme::As: return run_antenna_selection(problem, c.selection);
    case Scheme::Pso: return run_pso(problem, c.pso, algo);
  }
  throw ConfigError("scheme: unsupported");
}

}  // namespace

TrialRecord run_trial(const RunConfig& c, std::size_t trial) {
  const std::uint64_t child = child_seed(c.seed, trial);
  Rng chan(channel_stream_seed(child));
  Rng algo(algorithm_stream_seed(child));
  const auto t0 = std::chrono::steady_clock::now();

  CaseOutcome out;
  switch (c.case_kind) {
    case CaseKind::Capacity: {
      auto p = make_capacity_problem(sample_capacity_scenario(c.settings, chan), c.settings);
      out = dispatch(p, c, algo, solve_capacity);
      break;
    }
    case CaseKind::Mec: {
      auto p = make_mec_problem(sample_mec_scenario(c.settings, chan), c.settings);
      out = dispatch(p, c, algo, solve_mec);
      break;
    }
    case CaseKind::Rzf: {
      auto p = make_rzf_problem(sample_rzf_scenario(c.settings, chan), c.settings);
      out = dispatch(p, c, algo, solve_rzf);
      break;
    }
  }

  TrialRecord r;
  r.trial = trial;
  r.seed = child;
  r.case_name = to_string(c.case_kind);
  r.scheme = to_string(c.scheme);
  r.a_lambda = c.settings.panel;
  r.n = c.settings.n_tx;
  r.m = c.settings.n_rx;
  r.metric = out.metric;
  r.iters = out.penalty.iterations;
  r.rho_final = out.penalty.rho_final;
  r.resid = out.penalty.residual;
  r.min_dist = out.min_dist;
  r.trace = std::move(out.penalty.trace);
  r.t_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Summary summarize(const std::vector<TrialRecord>& records, double d_min) {
  Summary s;
  s.trials = records.size();
  if (records.empty()) return s;
  double sum = 0.0;
  std::size_t feasible = 0;
  for (const auto& r : records) {
    sum += r.metric;
    feasible += record_feasible(r, d_min) ? 1 : 0;
  }
  const auto n = static_cast<double>(records.size());
  s.mean = sum / n;
  if (records.size() > 1) {
    double ss = 0.0;
    for (const auto& r : records) ss += (r.metric - s.mean) * (r.metric - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  s.feasible_rate = static_cast<double>(feasible) / n;
  return s;
}

namespace {

// Runs fn(i) for i in [0, count) on `jobs` threads; rethrows the exception
// of the lowest failing index.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(count, 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

MonteCarloResult run_monte_carlo(const RunConfig& config) {
  config.validate();
  MonteCarloResult res;
  res.records.resize(config.trials);
  parallel_for(config.trials, config.jobs,
               [&](std::size_t t) { res.records[t] = run_trial(config, t); });
  res.summary = summarize(res.records, config.settings.d_min);
  return res;
}

std::string format_records(const std::vector<TrialRecord>& records, OutputFormat format) {
  std::string out;
  if (format == OutputFormat::Csv) {
    out += kCsvHeader;
    out += '\n';
    for (const auto& r : records) {
      out += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + r.case_name + ',' +
             r.scheme + ',' + format_double(r.a_lambda) + ',' + std::to_string(r.n) + ',' +
             std::to_string(r.m) + ',' + format_double(r.metric) + ',' + std::to_string(r.iters) +
             ',' + format_double(r.rho_final) + ',' + format_double(r.resid) + ',' +
             format_double(r.min_dist) + ',' + format_double(r.t_ms) + '\n';
    }
    return out;
  }
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["trial"] = r.trial;
    j["seed"] = r.seed;
    j["case"] = r.case_name;
    j["scheme"] = r.scheme;
    j["A_lambda"] = r.a_lambda;
    j["N"] = r.n;
    j["M"] = r.m;
    j["metric"] = r.metric;
    j["iters"] = r.iters;
    j["rho_final"] = r.rho_final;
    j["resid"] = r.resid;
    // JSON has no infinity; a lone antenna has no pairwise distance
    if (std::isfinite(r.min_dist)) j["min_dist"] = r.min_dist;
    else j["min_dist"] = nullptr;
    j["t_ms"] = r.t_ms;
    out += j.dump();
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::vector<TrialRecord> parse_records(const std::string& text, OutputFormat format) {
  std::vector<TrialRecord> out;
  std::istringstream in(text);
  std::string line;
  if (format == OutputFormat::Csv) {
    if (!std::getline(in, line) || line != kCsvHeader) {
      throw IoError("parse_records: missing or unexpected CSV header");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto c = split_csv(line);
      if (c.size() != 13) throw IoError("parse_records: expected 13 columns, got " + std::to_string(c.size()));
      TrialRecord r;
      r.trial = std::stoull(c[0]);
      r.seed = std::stoull(c[1]);
      r.case_name = c[2];
      r.scheme = c[3];
      r.a_lambda = std::stod(c[4]);
      r.n = std::stoull(c[5]);
      r.m = std::stoull(c[6]);
      r.metric = std::stod(c[7]);
      r.iters = std::stoull(c[8]);
      r.rho_final = std::stod(c[9]);
      r.resid = std::stod(c[10]);
      r.min_dist = std::stod(c[11]);
      r.t_ms = std::stod(c[12]);
      out.push_back(std::move(r));
    }
    return out;
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    TrialRecord r;
    r.trial = j.at("trial").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.case_name = j.at("case").get<std::string>();
    r.scheme = j.at("scheme").get<std::string>();
    r.a_lambda = j.at("A_lambda").get<double>();
    r.n = j.at("N").get<std::size_t>();
    r.m = j.at("M").get<std::size_t>();
    r.metric = j.at("metric").get<double>();
    r.iters = j.at("iters").get<std::size_t>();
    r.rho_final = j.at("rho_final").get<double>();
    r.resid = j.at("resid").get<double>();
    r.min_dist = j.at("min_dist").is_null() ? std::numeric_limits<double>::infinity()
                                            : j.at("min_dist").get<double>();
    r.t_ms = j.at("t_ms").get<double>();
    out.push_back(std::move(r));
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing '" + path + "'");
}

void emit_results(const std::vector<TrialRecord>& records, OutputFormat format,
                  const std::string& path) {
  if (records.empty()) throw IoError("emit_results: no records to write to '" + path + "'");
  write_text_file(path, format_records(records, format));
}

void emit_traces(const std::vector<TrialRecord>& records, const std::string& out_path) {
  const std::filesystem::path dir(out_path + ".traces");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  for (const auto& r : records) {
    write_text_file((dir / ("trial_" + std::to_string(r.trial) + ".jsonl")).string(),
                    trace_to_jsonl(r.trace));
  }
}

SweepParam parse_sweep_param(const std::string& s) {
  if (s == "panel") return SweepParam::Panel;
  if (s == "antennas") return SweepParam::Antennas;
  throw ConfigError("param: expected panel or antennas, got '" + s + "'");
}

std::vector<double> parse_value_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double("values", item));
  }
  if (out.empty()) throw ConfigError("values: expected a comma-separated list of numbers");
  return out;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, SweepParam param,
                                const std::vector<double>& values) {
  std::vector<SweepRow> rows;
  for (const double v : values) {
    RunConfig c = base;
    if (param == SweepParam::Panel) {
      c.settings.panel = v;
    } else {
      if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("values: antenna counts must be positive integers");
      c.settings.n_tx = c.settings.n_rx = static_cast<std::size_t>(v);
    }
    const auto res = run_monte_carlo(c);
    rows.push_back({to_string(c.case_kind), to_string(c.scheme),
                    param == SweepParam::Panel ? "panel" : "antennas", v, res.summary});
  }
  return rows;
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
  std::string out = "case,scheme,param,value,trials,mean,se,feasible_rate\n";
  for (const auto& r : rows) {
    out += r.case_name + ',' + r.scheme + ',' + r.param + ',' + format_double(r.value) + ',' +
           std::to_string(r.summary.trials) + ',' + format_double(r.summary.mean) + ',' +
           format_double(r.summary.std_error) + ',' + format_double(r.summary.feasible_rate) + '\n';
  }
  return out;
}

void ConnectivityConfig::validate() const {
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  if (!(panel > 0.0)) throw ConfigError("panel: must be positive");
  if (antennas < 2) throw ConfigError("antennas: need at least 2");
  if (!(d_min > 0.0)) throw ConfigError("d_min: must be positive");
  if (!(resolution > 0.0) || resolution > d_min / 10.0) {
    throw ConfigError("resolution: must be positive and at most d_min/10");
  }
  if (sweeps < 1) throw ConfigError("sweeps: must be >= 1");
  if (jobs < 1) throw ConfigError("jobs: must be >= 1");
  if (probe_stride < 1) throw ConfigError("probe_stride: must be >= 1");
}

namespace {

// Sequential rejection sampling of a separated layout.
std::vector<Position2D> random_separated_layout(std::size_t count, const Panel& panel,
                                                const SeparationConstraint& d, Rng& rng) {
  std::uniform_real_distribution<double> ux(panel.min_corner.x, panel.max_corner.x);
  std::uniform_real_distribution<double> uy(panel.min_corner.y, panel.max_corner.y);
  for (int restart = 0; restart < 1000; ++restart) {
    std::vector<Position2D> pts;
    for (int attempt = 0; attempt < 10000 && pts.size() < count; ++attempt) {
      const double x = ux(rng);
      const double y = uy(rng);
      if (is_separated({x, y}, pts, d, 0.0)) pts.push_back({x, y});
    }
    if (pts.size() == count) return pts;
  }
  throw std::runtime_error("random_separated_layout: could not place the antennas");
}

std::unique_ptr<CasePlugin> connectivity_problem(const ConnectivityConfig& c, Rng& rng) {
  CaseSettings s;
  s.panel = c.panel;
  s.n_tx = c.antennas;
  s.n_rx = c.antennas;
  s.d_min = c.d_min;
  switch (c.case_kind) {
    case CaseKind::Capacity:
      return std::make_unique<CapacityProblem>(make_capacity_problem(sample_capacity_scenario(s, rng), s));
    case CaseKind::Mec:
      return std::make_unique<MecProblem>(make_mec_problem(sample_mec_scenario(s, rng), s));
    case CaseKind::Rzf:
      return std::make_unique<RzfProblem>(make_rzf_problem(sample_rzf_scenario(s, rng), s));
  }
  throw ConfigError("case: unsupported");
}

ConnectivityTrial connectivity_trial(const ConnectivityConfig& c, std::size_t trial) {
  ConnectivityTrial out;
  out.trial = trial;
  out.seed = child_seed(c.seed, trial);
  Rng chan(channel_stream_seed(out.seed));
  Rng algo(algorithm_stream_seed(out.seed));
  auto problem = connectivity_problem(c, chan);
  const SeparationConstraint d(c.d_min);
  for (std::size_t g = 0; g < problem->groups().size(); ++g) {
    const auto& grp = problem->groups()[g];
    problem->set_positions(g, random_separated_layout(grp.r.size(), grp.panel, d, algo));
  }

  // Only the first group moves; the others stay at their random layout.
  auto& grp = problem->groups()[0];
  const PgdOptions step;
  for (std::size_t sweep = 0; sweep < c.sweeps; ++sweep) {
    problem->update_other_vars();
    for (std::size_t m = 0; m < grp.r.size(); ++m) {
      const auto raster = label_feasible_components(m, grp.r, grp.panel, d, c.resolution);
      const std::size_t comps = raster.components();
      out.max_components = std::max(out.max_components, comps);
      out.updates_split += comps >= 2 ? 1 : 0;
      ++out.updates;

      if (comps >= 2) {
        const Position2D here = grp.r[m];
        const int own = raster.label_near(here);
        const double f_here = problem->objective();
        double best = std::numeric_limits<double>::infinity();
        int best_label = FeasibleRaster::kBlocked;
        const std::size_t step = c.probe_stride;
        for (std::size_t j = step / 2; j < raster.ny; j += step) {
          for (std::size_t i = step / 2; i < raster.nx; i += step) {
            const int l = raster.labels[j * raster.nx + i];
            if (l < 0) continue;
            grp.r[m] = raster.cell_center(i, j);
            const double f = problem->objective();
            if (f < best) {
              best = f;
              best_label = l;
            }
          }
        }
        grp.r[m] = here;
        if (best_label >= 0 && best_label != own && best < f_here) ++out.updates_trapped;
      }

      const Vec2 g = problem->position_gradient(0)[m];
      std::vector<Position2D> others;
      for (std::size_t l = 0; l < grp.r.size(); ++l) {
        if (l != m) others.push_back(grp.r[l]);
      }
      // Separated local move: backtrack until the step stays feasible.
      double eta = step.step0;
      for (int bt = 0; bt < step.max_backtracks; ++bt, eta *= step.shrink) {
        const Position2D cand = grp.panel.project(grp.r[m] - eta * g);
        if (is_separated(cand, others, d, 0.0)) {
          grp.r[m] = cand;
          break;
        }
      }
      grp.z = grp.r;
    }
  }
  out.impacted = out.max_components >= 2;
  out.trapped = out.updates_trapped > 0;
  return out;
}

}  // namespace

ConnectivityResult diagnose_connectivity(const ConnectivityConfig& config) {
  config.validate();
  ConnectivityResult res;
  res.trials.resize(config.trials);
  parallel_for(config.trials, config.jobs,
               [&](std::size_t t) { res.trials[t] = connectivity_trial(config, t); });
  std::size_t impacted = 0;
  std::size_t trapped = 0;
  for (const auto& t : res.trials) {
    impacted += t.impacted ? 1 : 0;
    trapped += t.trapped ? 1 : 0;
  }
  const auto n = static_cast<double>(res.trials.size());
  res.impacted_fraction = static_cast<double>(impacted) / n;
  res.trapped_fraction = static_cast<double>(trapped) / n;
  return res;
}

std::string format_connectivity(const ConnectivityResult& result) {
  std::string out = "trial,seed,max_components,updates_split,updates,impacted,updates_trapped,trapped\n";
  for (const auto& t : result.trials) {
    out += std::to_string(t.trial) + ',' + std::to_string(t.seed) + ',' +
           std::to_string(t.max_components) + ',' + std::to_string(t.updates_split) + ',' +
           std::to_string(t.updates) + ',' + (t.impacted ? "1" : "0") + ',' +
           std::to_string(t.updates_trapped) + ',' + (t.trapped ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace maopt
