#pragma once

// Latency minimization for a single-server MEC uplink with a movable-antenna
// base station and zero-forcing reception.

#include <stdexcept>
#include <vector>

#include "maopt/channel.hpp"
#include "maopt/penalty.hpp"
#include "maopt/scenario.hpp"

namespace maopt {

class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kZfConditionLimit = 1e12;

/// W = H (H^H H)^{-1}. Throws RankDeficient when cond(H^H H) > 1e12 or M < N.
CMatrix zf_combiner(const CMatrix& h);

/// b log2(1 + SINR_n) for combiner column n; powers p_i are per user.
double user_rate(const CMatrix& h, const CMatrix& w, const std::vector<double>& powers,
                 double sigma2, double bandwidth, std::size_t n);

// b log2(k_n) with k_n = 1 + p_n/sigma2 * ||h_n||^2, the single-user
// matched-filter rate. Equal to the ZF rate only when the user channels
// are orthogonal (always for one user).
double matched_filter_rate(const CMatrix& h, double power, double sigma2, double bandwidth,
                           std::size_t n);

struct MecTasks {
  std::vector<double> data_bits;          // D_n
  std::vector<double> cycles_per_bit;     // C_n
  std::vector<double> result_bits;        // V_n
  std::vector<double> f_local;            // f_n^loc
  double cycles_per_bit_server = 200.0;   // C_s
  double f_server = 20e9;

  [[nodiscard]] std::size_t size() const { return data_bits.size(); }
  void validate() const;
};

double total_latency(const MecTasks& tasks, const std::vector<int>& beta,
                     const std::vector<double>& f_server_alloc, const std::vector<double>& rates);

/// Per-user closed-form offloading choice; ties stay local.
std::vector<int> offload_decision(const MecTasks& tasks, const std::vector<double>& f_server_alloc,
                                  const std::vector<double>& rates);

/// f_server sqrt(f_n^loc) / sum over offloaders of sqrt(f_k^loc); zero for local users.
std::vector<double> server_frequency_allocation(const MecTasks& tasks,
                                                const std::vector<int>& beta);

class MecProblem : public CasePlugin {
 public:
  MecProblem(ChannelRealization channel, std::vector<Position2D> user_positions,
             const Panel& rx_panel, std::size_t n_rx, MecTasks tasks, std::vector<double> powers,
             double sigma2, double bandwidth, SeparationConstraint d);

  /// beta first, then f^s, both at the current rates.
  void update_other_vars() override;
  /// Everyone offloads with an equal server share.
  void reset_other_vars() override;
  /// Total latency in seconds; +inf when the channel is rank deficient.
  [[nodiscard]] double objective() const override;
  [[nodiscard]] std::vector<Vec2> position_gradient(std::size_t group) const override;
  [[nodiscard]] double metric() const override { return objective(); }

  [[nodiscard]] CMatrix channel_matrix() const;
  /// ZF rates at the current positions.
  [[nodiscard]] std::vector<double> rates() const;

  [[nodiscard]] const MecTasks& tasks() const { return tasks_; }
  [[nodiscard]] const std::vector<int>& beta() const { return beta_; }
  [[nodiscard]] const std::vector<double>& server_alloc() const { return f_server_alloc_; }
  void set_beta(std::vector<int> b) { beta_ = std::move(b); }
  void set_server_alloc(std::vector<double> f) { f_server_alloc_ = std::move(f); }
  [[nodiscard]] const std::vector<double>& powers() const { return powers_; }
  [[nodiscard]] double sigma2() const { return sigma2_; }
  [[nodiscard]] double bandwidth() const { return bandwidth_; }

 private:
  ChannelRealization channel_;
  std::vector<Position2D> users_;
  MecTasks tasks_;
  std::vector<double> powers_;
  double sigma2_;
  double bandwidth_;
  std::vector<int> beta_;
  std::vector<double> f_server_alloc_;
};

struct MecScenario {
  ChannelRealization channel;
  std::vector<Position2D> users;
  MecTasks tasks;
};

MecScenario sample_mec_scenario(const CaseSettings& s, Rng& rng);
MecProblem make_mec_problem(const MecScenario& scenario, const CaseSettings& s);

CaseOutcome solve_mec(MecProblem& problem, const CaseSettings& s, Rng& rng);
CaseOutcome run_mec_case(const CaseSettings& s, Rng& rng);

}  // namespace maopt
