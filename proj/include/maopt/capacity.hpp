#pragma once

// MIMO capacity maximization with movable antennas on both link ends.

#include <stdexcept>
#include <vector>

#include "maopt/channel.hpp"
#include "maopt/penalty.hpp"
#include "maopt/scenario.hpp"

namespace maopt {

class ZeroChannel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// -log2 det(I + H Q H^H / sigma2), through a Cholesky factor.
double capacity_objective(const CMatrix& h, const CMatrix& q, double sigma2);

struct WaterFillingPowers {
  std::vector<double> gamma;  // per mode, same order as the input gains
  double level = 0.0;         // 1/gamma_0
  std::size_t active = 0;
};

// gamma_s = max(level - sigma2 / lambda_s^2, 0) with sum gamma_s = p_max.
// `singular_values` must be positive; any order is accepted.
WaterFillingPowers water_filling_powers(const std::vector<double>& singular_values, double p_max,
                                        double sigma2);

struct WaterFillingResult {
  CMatrix q;
  WaterFillingPowers powers;
  std::vector<double> singular_values;  // nonzero ones, descending
};

WaterFillingResult water_filling_full(const CMatrix& h, double p_max, double sigma2);
/// Capacity-achieving covariance V diag(gamma) V^H for the channel h.
CMatrix water_filling(const CMatrix& h, double p_max, double sigma2);

class CapacityProblem : public CasePlugin {
 public:
  static constexpr std::size_t kRx = 0;
  static constexpr std::size_t kTx = 1;

  CapacityProblem(ChannelRealization channel, const Panel& tx_panel, const Panel& rx_panel,
                  std::size_t n_tx, std::size_t n_rx, double p_max, double sigma2,
                  SeparationConstraint d);

  void update_other_vars() override;
  void reset_other_vars() override { q_.setZero(); }
  [[nodiscard]] double objective() const override;
  [[nodiscard]] std::vector<Vec2> position_gradient(std::size_t group) const override;
  [[nodiscard]] double metric() const override { return -objective(); }

  [[nodiscard]] CMatrix channel_matrix() const;
  [[nodiscard]] const CMatrix& covariance() const { return q_; }
  void set_covariance(CMatrix q) { q_ = std::move(q); }
  [[nodiscard]] const ChannelRealization& realization() const { return channel_; }
  [[nodiscard]] double p_max() const { return p_max_; }
  [[nodiscard]] double sigma2() const { return sigma2_; }

  // Receive-side gradient written with the leave-one-row-out matrices
  // W_{\m} and B_{\m}. Same value as position_gradient(kRx).
  [[nodiscard]] Vec2 rx_gradient_leave_one_out(std::size_t m) const;

 private:
  ChannelRealization channel_;
  CMatrix q_;
  double p_max_;
  double sigma2_;
};

struct CapacityScenario {
  ChannelRealization channel;
};

CapacityScenario sample_capacity_scenario(const CaseSettings& s, Rng& rng);
CapacityProblem make_capacity_problem(const CapacityScenario& scenario, const CaseSettings& s);

/// Penalty AO from a random start; metric is the capacity in bits/s/Hz.
CaseOutcome solve_capacity(CapacityProblem& problem, const CaseSettings& s, Rng& rng);
CaseOutcome run_capacity_case(const CaseSettings& s, Rng& rng);

}  // namespace maopt
