#pragma once

// Reference schemes: fixed half-wavelength arrays, exhaustive antenna
// selection on a fixed candidate grid, and particle swarm with a distance
// penalty.

#include <cstddef>
#include <functional>
#include <vector>

#include "maopt/channel.hpp"
#include "maopt/geometry.hpp"
#include "maopt/penalty.hpp"
#include "maopt/scenario.hpp"

namespace maopt {

inline constexpr double kHalfWavelength = 0.5;

// floor(sqrt(count)) rows of ceil(count/rows) antennas, filled row by row
// and centered on the origin. The panel size is deliberately ignored.
std::vector<Position2D> fpa_layout(std::size_t count, double spacing = kHalfWavelength);

/// rows x cols grid with the given spacing, centered on `center`, row-major.
std::vector<Position2D> candidate_grid(std::size_t rows, std::size_t cols, double spacing,
                                       const Position2D& center = {});

/// Calls fn with every k-subset of {0..n-1} in lexicographic order; returns the count.
std::size_t for_each_combination(std::size_t n, std::size_t k,
                                 const std::function<void(const std::vector<std::size_t>&)>& fn);

enum class SelectionMode { Alternating, Joint };

struct SelectionConfig {
  SelectionMode mode = SelectionMode::Alternating;
  int rounds = 2;
};

using Selection = std::vector<std::vector<std::size_t>>;  // chosen indices per side
using SelectionObjective = std::function<double(const Selection&)>;  // minimized

struct SelectionResult {
  Selection chosen;
  double value = 0.0;
  double initial_value = 0.0;
  std::size_t evaluations = 0;
};

// Exhaustive antenna selection. Alternating mode exhausts one side with the
// others fixed, cycling sides for `rounds` rounds from the first-k start;
// joint mode exhausts the Cartesian product of all sides.
SelectionResult antenna_selection(const std::vector<std::size_t>& candidates,
                                  const std::vector<std::size_t>& select,
                                  const SelectionObjective& objective,
                                  const SelectionConfig& config = {});

struct PsoConfig {
  std::size_t swarm = 50;
  double inertia = 0.7;
  double cognitive = 1.5;
  double social = 1.5;
  std::size_t iterations = 200;
  double penalty_scale = 100.0;  // penalty weight = scale * |objective at the first particle|

  void validate() const;
};

struct PsoBlock {
  Panel panel;
  std::size_t count;
};

using FlatObjective = std::function<double(std::span<const Position2D>)>;

struct PsoResult {
  std::vector<Position2D> positions;  // blocks concatenated
  double fitness = 0.0;
  double objective = 0.0;
  double penalty_weight = 0.0;
  bool feasible = false;
};

/// Sum over same-block pairs of max(0, D - distance)^2.
double separation_violation(std::span<const Position2D> positions,
                            const std::vector<PsoBlock>& blocks, const SeparationConstraint& d);

PsoResult pso_optimize(const FlatObjective& objective, const std::vector<PsoBlock>& blocks,
                       const SeparationConstraint& d, const PsoConfig& config, Rng& rng);

// Plugin-level drivers. Each leaves the plugin at the chosen positions with
// its other variables optimized and returns the outcome there.
CaseOutcome run_fpa(CasePlugin& plugin, double spacing = kHalfWavelength);
CaseOutcome run_antenna_selection(CasePlugin& plugin, const SelectionConfig& config = {},
                                  double spacing = kHalfWavelength);
CaseOutcome run_pso(CasePlugin& plugin, const PsoConfig& config, Rng& rng);

}  // namespace maopt
