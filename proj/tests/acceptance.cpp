// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "maopt/capacity.hpp"
#include "maopt/harness.hpp"
#include "maopt/mec.hpp"
#include "maopt/rzf.hpp"

using namespace maopt;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix h(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) h(i, j) = sample_complex_gaussian(1.0, rng);
  }
  return h;
}

// ---------------------------------------------------------------------------

Verdict projection_oracle() {
  const auto t0 = Clock::now();
  const SeparationConstraint d(0.5);
  Rng rng(1001);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_int_distribution<int> m_count(2, 8);
  int failures = 0;
  int degraded = 0;
  double worst_gap = -1e300;
  for (int inst = 0; inst < 1000; ++inst) {
    const int m = m_count(rng);
    std::vector<Position2D> others(static_cast<std::size_t>(m - 1));
    for (auto& p : others) p = Position2D{u(rng), u(rng)};
    const Position2D t{u(rng), u(rng)};
    const auto res = solve_separation_projection(t, others, d);
    const auto grid = brute_force_projection_oracle(t, others, d, 1.0 / 400.0);
    const double gap = distance(res.point, t) - distance(grid, t);
    worst_gap = std::max(worst_gap, gap);
    degraded += res.degraded ? 1 : 0;
    if (gap > 1e-12 || !is_separated(res.point, others, d, 1e-9)) ++failures;
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < 30.0,
          fmt("1000 instances, %d failures, %d degraded, worst closed-form minus grid %.3g, %.1f s (limit 30 s)",
              failures, degraded, worst_gap, secs)};
}

// Worst per-coordinate relative error. Coordinates smaller than 1e-3 of
// the group's largest component are measured against that floor.
double gradient_error(CasePlugin& p) {
  double worst = 0.0;
  for (std::size_t g = 0; g < p.groups().size(); ++g) {
    const auto an = p.position_gradient(g);
    const auto saved = p.groups()[g].r;
    const ValueFn f = [&](std::span<const Position2D> x) {
      p.groups()[g].r.assign(x.begin(), x.end());
      return p.objective();
    };
    const auto fd = finite_difference_gradient(f, saved, 1e-6);
    p.groups()[g].r = saved;
    double scale = 0.0;
    for (const auto& v : an) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
    for (std::size_t i = 0; i < an.size(); ++i) {
      for (const auto& [a, b] : {std::pair{an[i].x, fd[i].x}, std::pair{an[i].y, fd[i].y}}) {
        const double den = std::max({std::abs(a), std::abs(b), 1e-3 * scale, 1e-300});
        worst = std::max(worst, std::abs(a - b) / den);
      }
    }
  }
  return worst;
}

Verdict gradient_suites() {
  const auto t0 = Clock::now();
  const CaseSettings s;
  double worst[3] = {0, 0, 0};
  int skipped = 0;
  for (int inst = 0; inst < 100; ++inst) {
    Rng rng(5000 + static_cast<std::uint64_t>(inst));
    {
      auto p = make_capacity_problem(sample_capacity_scenario(s, rng), s);
      initialize_positions(p, rng);
      p.update_other_vars();
      worst[0] = std::max(worst[0], gradient_error(p));
    }
    {
      auto p = make_mec_problem(sample_mec_scenario(s, rng), s);
      initialize_positions(p, rng);
      p.update_other_vars();
      if (std::isfinite(p.objective())) worst[1] = std::max(worst[1], gradient_error(p));
      else ++skipped;
    }
    {
      auto p = make_rzf_problem(sample_rzf_scenario(s, rng), s);
      initialize_positions(p, rng);
      p.update_other_vars();
      worst[2] = std::max(worst[2], gradient_error(p));
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst[0] <= 1e-4 && worst[1] <= 1e-4 && worst[2] <= 1e-4 && skipped == 0 && secs < 120.0;
  return {ok, fmt("100 instances per case, worst rel err capacity %.2e mec %.2e rzf %.2e (limit 1e-4), "
                  "%d non-finite, %.1f s (limit 120 s)",
                  worst[0], worst[1], worst[2], skipped, secs)};
}

Verdict water_filling_kkt() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_trace = 0.0;
  double worst_level = 0.0;
  int beaten = 0;
  int inactive_bad = 0;
  for (int c = 0; c < 1000; ++c) {
    const CMatrix h = random_matrix(dim(rng), dim(rng), rng);
    const double sigma2 = 0.1 + unit(rng);
    const double p = 0.1 + 50.0 * unit(rng);
    const auto wf = water_filling_full(h, p, sigma2);
    worst_trace = std::max(worst_trace, std::abs(wf.q.trace().real() - p));
    for (std::size_t s = 0; s < wf.singular_values.size(); ++s) {
      const double floor = sigma2 / (wf.singular_values[s] * wf.singular_values[s]);
      if (wf.powers.gamma[s] > 0.0) {
        worst_level = std::max(worst_level, std::abs(wf.powers.gamma[s] + floor - wf.powers.level));
      } else if (floor < wf.powers.level - 1e-9) {
        ++inactive_bad;
      }
    }
    const double best = capacity_objective(h, wf.q, sigma2);
    for (int k = 0; k < 1000; ++k) {
      const CMatrix a = random_matrix(h.cols(), h.cols(), rng);
      CMatrix r = a * a.adjoint();
      r *= p / r.trace().real();
      // mix of small nudges and large moves, all with trace p
      const double t = k % 2 == 0 ? 1e-3 * unit(rng) : unit(rng);
      const CMatrix q = (1.0 - t) * wf.q + t * r;
      if (capacity_objective(h, q, sigma2) < best - 1e-12) ++beaten;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_trace <= 1e-9 && worst_level <= 1e-9 && beaten == 0 && inactive_bad == 0;
  return {ok, fmt("1000 channels, |tr Q - P| %.2e, level spread %.2e (limit 1e-9), %d inactive above "
                  "level, %d of 1e6 perturbations better, %.1f s",
                  worst_trace, worst_level, inactive_bad, beaten, secs)};
}

struct CaseRuns {
  std::string name;
  std::vector<TrialRecord> records;
  double seconds = 0.0;
};

CaseRuns run_case(CaseKind c, std::size_t trials, std::uint64_t seed) {
  RunConfig cfg;
  cfg.case_kind = c;
  cfg.trials = trials;
  cfg.seed = seed;
  const auto t0 = Clock::now();
  auto res = run_monte_carlo(cfg);
  return {to_string(c), std::move(res.records), seconds_since(t0)};
}

Verdict penalty_mechanics(const std::vector<CaseRuns>& runs) {
  std::size_t rho_bad = 0;
  std::size_t monotone_bad = 0;
  std::size_t infeasible = 0;
  std::size_t total = 0;
  double worst_rise = 0.0;
  std::string per_case;
  for (const auto& cr : runs) {
    std::size_t min_ok = 0;
    for (const auto& r : cr.records) {
      ++total;
      for (const auto& it : r.trace) {
        if (it.rho != 5.0 * std::pow(1.2, static_cast<double>(it.outer))) ++rho_bad;
        for (std::size_t s = 1; s < it.substeps.size(); ++s) {
          const double rise = it.substeps[s] - it.substeps[s - 1];
          const double tol = 1e-9 * std::max(1.0, std::abs(it.substeps[s - 1]));
          worst_rise = std::max(worst_rise, rise / std::max(1.0, std::abs(it.substeps[s - 1])));
          if (rise > tol) ++monotone_bad;
        }
      }
      if (record_feasible(r, 0.5)) ++min_ok;
      else ++infeasible;
    }
    per_case += fmt(" %s %zu/%zu separated;", cr.name.c_str(), min_ok, cr.records.size());
  }
  return {rho_bad == 0 && monotone_bad == 0 && infeasible == 0,
          fmt("%zu trials, rho mismatches %zu, substep rises %zu (worst rel %.2e, tol 1e-9),%s",
              total, rho_bad, monotone_bad, worst_rise, per_case.c_str())};
}

Verdict convergence_scale(const std::vector<CaseRuns>& runs) {
  struct Band {
    double lo, hi;
  };
  const Band bands[3] = {{5, 30}, {2, 10}, {10, 40}};
  bool ok = true;
  double secs = 0.0;
  std::string detail;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto& cr = runs[c];
    std::vector<double> iters;
    std::size_t over30 = 0;
    std::size_t rho_bad = 0;
    const std::size_t n = std::min<std::size_t>(50, cr.records.size());
    for (std::size_t t = 0; t < n; ++t) {
      const auto& r = cr.records[t];
      iters.push_back(static_cast<double>(r.iters));
      over30 += r.iters > 30 ? 1 : 0;
      // rho_final is the factor of the last iteration, counted from k = 0
      if (r.rho_final != 5.0 * std::pow(1.2, static_cast<double>(r.iters - 1))) ++rho_bad;
    }
    const double med = median(iters);
    const double med_rho = 5.0 * std::pow(1.2, std::round(med) - 1.0);
    ok = ok && med >= bands[c].lo && med <= bands[c].hi && rho_bad == 0;
    secs += cr.seconds * static_cast<double>(n) / static_cast<double>(cr.records.size());
    detail += fmt(" %s median %.1f [%.0f, %.0f] rho %.2f, %zu/%zu over 30 iters;", cr.name.c_str(),
                  med, bands[c].lo, bands[c].hi, med_rho, over30, n);
  }
  ok = ok && secs < 900.0;
  return {ok, fmt("50 trials per case,%s %.0f s (limit 900 s)", detail.c_str(), secs)};
}

struct Paired {
  double mean = 0.0;
  double se = 0.0;
};

Paired paired_difference(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b,
                         double sign) {
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = sign * (a[i].metric - b[i].metric);
  Paired p;
  for (const double x : d) p.mean += x;
  p.mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const double x : d) ss += (x - p.mean) * (x - p.mean);
  p.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return p;
}

Verdict baseline_dominance() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const double a : {2.0, 3.0}) {
    auto run = [&](CaseKind c, Scheme s) {
      RunConfig cfg;
      cfg.case_kind = c;
      cfg.scheme = s;
      cfg.trials = 50;
      cfg.seed = 77;
      cfg.settings.panel = a;
      return run_monte_carlo(cfg).records;
    };
    struct Pair {
      CaseKind c;
      Scheme base;
      double sign;  // +1 when larger is better
    };
    const Pair pairs[] = {{CaseKind::Capacity, Scheme::Fpa, 1.0},
                          {CaseKind::Capacity, Scheme::As, 1.0},
                          {CaseKind::Mec, Scheme::Fpa, -1.0},
                          {CaseKind::Rzf, Scheme::Fpa, 1.0}};
    std::vector<TrialRecord> proposed[3];
    for (const auto& pr : pairs) {
      auto& prop = proposed[static_cast<int>(pr.c)];
      if (prop.empty()) prop = run(pr.c, Scheme::Proposed);
      const auto base = run(pr.c, pr.base);
      const auto diff = paired_difference(prop, base, pr.sign);
      const bool good = diff.mean > 2.0 * diff.se && diff.mean > 0.0;
      ok = ok && good;
      detail += fmt(" A=%g %s vs %s %+.4g (se %.2g)%s;", a, to_string(pr.c).c_str(),
                    to_string(pr.base).c_str(), diff.mean, diff.se, good ? "" : " WEAK");
    }
  }
  return {ok, fmt("50 paired trials, margin > 2 se:%s %.0f s", detail.c_str(), seconds_since(t0))};
}

Verdict connectivity_fraction() {
  const auto t0 = Clock::now();
  ConnectivityConfig c;
  c.trials = 200;
  c.panel = 2.0;
  c.antennas = 6;
  c.d_min = 0.5;
  c.sweeps = 3;
  const auto res = diagnose_connectivity(c);
  const bool ok = res.impacted_fraction >= 0.50 && res.impacted_fraction <= 0.95;
  return {ok, fmt("200 trials, M=6, A=2, 3 sweeps: fraction with >= 2 components %.3f (band [0.50, 0.95]); "
                  "informational: fraction with a better cell in another component %.3f; %.1f s",
                  res.impacted_fraction, res.trapped_fraction, seconds_since(t0))};
}

// Most length-B intervals with pairwise gaps >= D inside [0, A], all lengths
// integer multiples of D, found by trying every subset of grid starts.
long brute_force_packing(int a, int b) {
  const int slots = a - b + 1;
  if (slots <= 0) return 0;
  long best = 0;
  for (unsigned mask = 1; mask < (1u << slots); ++mask) {
    int last = -1000;
    bool fits = true;
    long count = 0;
    for (int s = 0; s < slots && fits; ++s) {
      if (!(mask & (1u << s))) continue;
      if (s < last + b + 1) fits = false;
      last = s;
      ++count;
    }
    if (fits) best = std::max(best, count);
  }
  return best;
}

Verdict conservative_counts() {
  const SeparationConstraint d(0.5);
  int mismatches = 0;
  int checked = 0;
  for (int a = 1; a <= 10; ++a) {
    for (int b = 1; b <= 10; ++b) {
      ++checked;
      if (conservative_capacity(a * d.d_min, b * d.d_min, d) != brute_force_packing(a, b)) ++mismatches;
    }
  }
  for (int ax = 1; ax <= 10; ++ax) {
    for (int ay = 1; ay <= 10; ++ay) {
      for (int bx = 1; bx <= 10; ++bx) {
        for (int by = 1; by <= 10; ++by) {
          ++checked;
          const long expect = brute_force_packing(ax, bx) * brute_force_packing(ay, by);
          if (conservative_capacity(ax * d.d_min, ay * d.d_min, bx * d.d_min, by * d.d_min, d) != expect) {
            ++mismatches;
          }
        }
      }
    }
  }
  return {mismatches == 0, fmt("%d cases (1D and 2D), %d mismatches", checked, mismatches)};
}

std::string strip_time_column(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    out += line.substr(0, line.rfind(','));
    out += '\n';
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Verdict cli_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "maopt_acceptance";
  std::filesystem::create_directories(dir);
  std::string outs[2];
  for (int i = 0; i < 2; ++i) {
    const auto path = dir / ("run" + std::to_string(i) + ".csv");
    std::filesystem::remove(path);
    const std::string cmd = std::string("\"") + MAOPT_CLI_PATH +
                            "\" run --case capacity --trials 20 --seed 7 --out \"" + path.string() +
                            "\" > /dev/null";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, fmt("cli exited with status %d", rc)};
    outs[i] = slurp(path);
  }
  std::filesystem::remove_all(dir);
  const bool same = !outs[0].empty() && strip_time_column(outs[0]) == strip_time_column(outs[1]);
  std::size_t lines = static_cast<std::size_t>(std::count(outs[0].begin(), outs[0].end(), '\n'));
  return {same, fmt("two runs, %zu lines each, identical outside t_ms: %s", lines, same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  // optional filter: run only criteria whose name contains argv[1]
  const std::string filter = argc > 1 ? argv[1] : "";
  int failed = 0;
  auto report = [&](const char* name, const std::function<Verdict()>& fn) {
    if (!filter.empty() && std::string(name).find(filter) == std::string::npos) return;
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  };

  report("projection_oracle", projection_oracle);
  report("gradient_suites", gradient_suites);
  report("water_filling_kkt", water_filling_kkt);

  std::vector<CaseRuns> runs;
  auto ensure_runs = [&] {
    if (runs.empty()) {
      for (const auto c : {CaseKind::Capacity, CaseKind::Mec, CaseKind::Rzf}) runs.push_back(run_case(c, 100, 2026));
    }
  };
  report("penalty_mechanics", [&] {
    ensure_runs();
    return penalty_mechanics(runs);
  });
  report("convergence_scale", [&] {
    ensure_runs();
    return convergence_scale(runs);
  });
  report("baseline_dominance", baseline_dominance);
  report("connectivity_fraction", connectivity_fraction);
  report("conservative_counts", conservative_counts);
  report("cli_determinism", cli_determinism);

  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
