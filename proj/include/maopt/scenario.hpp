#pragma once

// Settings shared by the three case studies and the outcome of one solve.

#include <cstddef>
#include <limits>
#include <vector>

#include "maopt/geometry.hpp"
#include "maopt/penalty.hpp"

namespace maopt {

struct CaseSettings {
  double panel = 5.0;          // side A of every square panel, in wavelengths
  std::size_t n_tx = 6;        // N: transmit MAs / MEC users / RZF base-station MAs
  std::size_t n_rx = 6;        // M: receive MAs / MEC base-station MAs / RZF users
  std::size_t num_paths = 10;  // L
  double kappa = 1.0;
  double snr_db = 15.0;        // P / sigma^2 (MEC: p_n / sigma^2)
  double sigma2 = 1.0;
  double d_min = 0.5;

  PenaltySchedule schedule;
  StopRule stop;
  PgdOptions pgd;

  // MEC task model
  double bandwidth_hz = 100e6;
  double cycles_per_bit_local = 1000.0;
  double result_ratio = 0.2;            // V_n / D_n
  double cycles_per_bit_server = 200.0;
  double f_server_hz = 20e9;
  double f_local_min_hz = 0.5e9;
  double f_local_max_hz = 1.5e9;
  double bits_per_local_hz = 5e-3;      // D_n = bits_per_local_hz * f_n^loc
  double user_spacing = 1.7;

  // RZF; alpha <= 0 selects M sigma^2 / P
  double rzf_alpha = 0.0;

  [[nodiscard]] double snr_linear() const;
  [[nodiscard]] double power() const { return snr_linear() * sigma2; }
  [[nodiscard]] SeparationConstraint separation() const { return SeparationConstraint(d_min); }
  [[nodiscard]] Panel square_panel() const { return Panel::centered_square(panel); }
};

struct CaseOutcome {
  double metric = 0.0;
  std::vector<std::vector<Position2D>> positions;  // one list per optimized group
  double min_dist = std::numeric_limits<double>::infinity();
  PenaltyResult penalty;  // empty trace for the baselines
};

/// Smallest within-group pairwise distance; +inf when no group has two antennas.
double min_group_distance(const std::vector<std::vector<Position2D>>& groups);

/// Copies the current r of every group of the plugin into an outcome.
CaseOutcome outcome_from(const CasePlugin& plugin);

}  // namespace maopt
