#pragma once

// Regularized zero-forcing precoding with a movable-antenna base station
// serving single-antenna users.

#include <stdexcept>
#include <vector>

#include "maopt/channel.hpp"
#include "maopt/penalty.hpp"
#include "maopt/scenario.hpp"

namespace maopt {

class ZeroPrecoder : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// ||I_M - H W||_F^2 + alpha ||W||_F^2
double rzf_objective(const CMatrix& h, const CMatrix& w, double alpha);

/// W = H^H (H H^H + alpha I)^{-1}
CMatrix rzf_closed_form(const CMatrix& h, double alpha);

// Sum of log2(1 + SINR_m) after scaling W to Frobenius norm sqrt(p_max).
// Row m of H is user m's channel.
double sum_rate(const CMatrix& h, const CMatrix& w, double p_max, double sigma2);

// Each user sees its own multipath channel. Its field response toward the
// base station is f(r_m)^H Sigma_m G_m(t), so the M x N channel is stacked
// from one row per user.
class RzfProblem : public CasePlugin {
 public:
  RzfProblem(std::vector<ChannelRealization> user_channels, std::vector<Position2D> user_positions,
             const Panel& tx_panel, std::size_t n_tx, double alpha, double p_max, double sigma2,
             SeparationConstraint d);

  void update_other_vars() override;
  void reset_other_vars() override { w_.setZero(); }
  [[nodiscard]] double objective() const override;
  [[nodiscard]] std::vector<Vec2> position_gradient(std::size_t group) const override;
  /// Sum rate in bits/s/Hz.
  [[nodiscard]] double metric() const override;

  [[nodiscard]] CMatrix channel_matrix() const;
  [[nodiscard]] const CMatrix& precoder() const { return w_; }
  void set_precoder(CMatrix w) { w_ = std::move(w); }
  [[nodiscard]] double alpha() const { return alpha_; }

 private:
  // Row m is f(r_m)^H Sigma_m (1 x L).
  std::vector<Eigen::RowVectorXcd> user_rows_;
  std::vector<ChannelRealization> channels_;
  double alpha_;
  double p_max_;
  double sigma2_;
  CMatrix w_;
};

struct RzfScenario {
  std::vector<ChannelRealization> channels;
  std::vector<Position2D> users;
};

RzfScenario sample_rzf_scenario(const CaseSettings& s, Rng& rng);
RzfProblem make_rzf_problem(const RzfScenario& scenario, const CaseSettings& s);
/// M sigma^2 / P unless the settings override it.
double rzf_alpha(const CaseSettings& s);

CaseOutcome solve_rzf(RzfProblem& problem, const CaseSettings& s, Rng& rng);
CaseOutcome run_rzf_case(const CaseSettings& s, Rng& rng);

}  // namespace maopt
