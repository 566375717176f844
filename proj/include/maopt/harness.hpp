#pragma once

// Monte-Carlo runner: configuration, per-trial seeding, scheme dispatch,
// result files, parameter sweeps and the feasible-set connectivity study.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "maopt/baselines.hpp"
#include "maopt/penalty.hpp"
#include "maopt/scenario.hpp"

namespace maopt {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CaseKind { Capacity, Mec, Rzf };
enum class Scheme { Proposed, Fpa, As, Pso };
enum class OutputFormat { Csv, Jsonl };

std::string to_string(CaseKind c);
std::string to_string(Scheme s);
CaseKind parse_case(const std::string& s);
Scheme parse_scheme(const std::string& s);
OutputFormat parse_format(const std::string& s);
/// jsonl for *.jsonl / *.json paths, csv otherwise.
OutputFormat format_for_path(const std::string& path);

struct RunConfig {
  CaseKind case_kind = CaseKind::Capacity;
  Scheme scheme = Scheme::Proposed;
  std::size_t trials = 500;
  std::uint64_t seed = 1;
  CaseSettings settings;
  PsoConfig pso;
  SelectionConfig selection;
  std::string out_path;
  bool trace = false;
  std::size_t jobs = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

// Sets one field from its config-file key. Unknown keys and malformed
// values raise ConfigError.
void apply_config_value(RunConfig& config, const std::string& key, const std::string& value);
/// key = value lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

// Trial t of a run seeded with `master`: splitmix64(master ^ splitmix64(t + golden)).
std::uint64_t child_seed(std::uint64_t master, std::uint64_t trial);
/// Seeds of the channel stream and the algorithm stream of one trial.
std::uint64_t channel_stream_seed(std::uint64_t child);
std::uint64_t algorithm_stream_seed(std::uint64_t child);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string case_name;
  std::string scheme;
  double a_lambda = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  double metric = 0.0;
  std::size_t iters = 0;
  double rho_final = 0.0;
  double resid = 0.0;
  double min_dist = 0.0;
  double t_ms = 0.0;
  std::vector<IterationTrace> trace;  // not part of the result files

  friend bool operator==(const TrialRecord& a, const TrialRecord& b);
};

struct Summary {
  std::size_t trials = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double feasible_rate = 0.0;
};

struct MonteCarloResult {
  std::vector<TrialRecord> records;  // sorted by trial index
  Summary summary;
};

/// Feasible when min_dist >= D - 1e-6 (single antennas always are).
bool record_feasible(const TrialRecord& r, double d_min);

TrialRecord run_trial(const RunConfig& config, std::size_t trial);
MonteCarloResult run_monte_carlo(const RunConfig& config);
Summary summarize(const std::vector<TrialRecord>& records, double d_min);

inline constexpr const char* kCsvHeader =
    "trial,seed,case,scheme,A_lambda,N,M,metric,iters,rho_final,resid,min_dist,t_ms";

std::string format_records(const std::vector<TrialRecord>& records, OutputFormat format);
std::vector<TrialRecord> parse_records(const std::string& text, OutputFormat format);
void emit_results(const std::vector<TrialRecord>& records, OutputFormat format,
                  const std::string& path);
/// One JSON-lines trace file per trial under `<out_path>.traces/`.
void emit_traces(const std::vector<TrialRecord>& records, const std::string& out_path);
void write_text_file(const std::string& path, const std::string& text);

enum class SweepParam { Panel, Antennas };
SweepParam parse_sweep_param(const std::string& s);
std::vector<double> parse_value_list(const std::string& s);

struct SweepRow {
  std::string case_name;
  std::string scheme;
  std::string param;
  double value = 0.0;
  Summary summary;
};

/// Antennas sets N and M together.
std::vector<SweepRow> run_sweep(const RunConfig& base, SweepParam param,
                                const std::vector<double>& values);
std::string format_sweep(const std::vector<SweepRow>& rows);

struct ConnectivityConfig {
  CaseKind case_kind = CaseKind::Capacity;
  std::size_t trials = 200;
  double panel = 2.0;
  std::size_t antennas = 6;
  double resolution = kDefaultConnectivityResolution;
  double d_min = 0.5;
  std::size_t sweeps = 3;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::size_t probe_stride = 5;  // objective sampled on every n-th raster cell per axis

  void validate() const;
};

struct ConnectivityTrial {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::size_t max_components = 0;
  std::size_t updates_split = 0;  // antenna updates that saw >= 2 components
  std::size_t updates = 0;
  bool impacted = false;
  // updates whose best sampled free cell lies in another component than the
  // antenna and beats its current objective
  std::size_t updates_trapped = 0;
  bool trapped = false;
};

struct ConnectivityResult {
  std::vector<ConnectivityTrial> trials;
  double impacted_fraction = 0.0;  // trials with >= 2 components at some update
  double trapped_fraction = 0.0;
};

// Random separated start, then `sweeps` rounds of sequential single-antenna
// gradient steps that keep the iterate separated. Before each update the
// free region of the moving antenna is rasterized and its components counted.
ConnectivityResult diagnose_connectivity(const ConnectivityConfig& config);
std::string format_connectivity(const ConnectivityResult& result);

}  // namespace maopt
