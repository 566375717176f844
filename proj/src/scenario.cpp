#include "maopt/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace maopt {

double CaseSettings::snr_linear() const { return std::pow(10.0, snr_db / 10.0); }

double min_group_distance(const std::vector<std::vector<Position2D>>& groups) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : groups) {
    if (g.size() >= 2) best = std::min(best, min_pairwise_distance(g));
  }
  return best;
}

CaseOutcome outcome_from(const CasePlugin& plugin) {
  CaseOutcome out;
  out.metric = plugin.metric();
  for (const auto& g : plugin.groups()) out.positions.push_back(g.r);
  out.min_dist = min_group_distance(out.positions);
  return out;
}

}  // namespace maopt
