#pragma once

// Penalty alternating optimization: positions r move freely in their panels,
// auxiliary copies z carry the separation constraints, and the coupling term
// rho * sum ||r - z||^2 is tightened geometrically between outer iterations.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "maopt/channel.hpp"
#include "maopt/geometry.hpp"

namespace maopt {

/// Two-component vector sharing the position type (gradients, steps).
using Vec2 = Position2D;

struct PenaltySchedule {
  double rho_init = 5.0;
  double growth = 1.2;

  /// Penalty factor used during outer iteration `k` (0-based): rho_init * growth^k.
  [[nodiscard]] double rho(std::size_t k) const {
    return rho_init * std::pow(growth, static_cast<double>(k));
  }
  void validate() const;
};

struct StopRule {
  double rel_change_tol = 1e-3;
  std::size_t max_outer_iters = 100;
  double residual_tol = 1e-9;

  void validate() const;
};

/// Armijo-backtracking projected gradient settings for the position blocks.
struct PgdOptions {
  double step0 = 0.1;
  double shrink = 0.5;
  double armijo_c = 1e-4;
  int max_backtracks = 30;
  double rel_change_tol = 1e-3;
  std::size_t max_iters = 200;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Antennas that move together in one panel and share a separation constraint.
struct PositionGroup {
  std::string name;
  Panel panel;
  std::vector<Position2D> r;
  std::vector<Position2D> z;
};

// A case study plugged into the engine. The plugin owns the position groups
// and every non-position variable; the engine only ever touches r and z.
class CasePlugin {
 public:
  explicit CasePlugin(SeparationConstraint d) : separation_(d) {}
  virtual ~CasePlugin() = default;
  CasePlugin(const CasePlugin&) = default;
  CasePlugin& operator=(const CasePlugin&) = default;
  CasePlugin(CasePlugin&&) = default;
  CasePlugin& operator=(CasePlugin&&) = default;

  /// Closed-form (or exact) update of the non-position variables at the current r.
  virtual void update_other_vars() = 0;
  /// Unpenalized objective (minimization sense) at the current r and other variables.
  [[nodiscard]] virtual double objective() const = 0;
  /// Gradient of objective() with respect to each position of one group.
  [[nodiscard]] virtual std::vector<Vec2> position_gradient(std::size_t group) const = 0;
  /// Reported figure of merit: capacity, latency or sum rate, in natural sign.
  [[nodiscard]] virtual double metric() const = 0;

  // Repeats update_other_vars() until the objective settles. Used by the
  // schemes that keep positions fixed.
  virtual std::size_t optimize_other_vars(double rel_tol = 1e-3, std::size_t max_rounds = 50);
  /// Restores the non-position variables to their initial values.
  virtual void reset_other_vars() {}

  std::vector<PositionGroup>& groups() { return groups_; }
  [[nodiscard]] const std::vector<PositionGroup>& groups() const { return groups_; }
  [[nodiscard]] const SeparationConstraint& separation() const { return separation_; }

  /// Sets r (and z) of a group.
  void set_positions(std::size_t group, std::vector<Position2D> positions);

 protected:
  std::vector<PositionGroup> groups_;
  SeparationConstraint separation_;
};

struct IterationTrace {
  std::size_t outer = 0;
  double rho = 0.0;
  double f_pen = 0.0;
  double f_raw = 0.0;
  double resid = 0.0;
  double t_ms = 0.0;
  // Penalized objective at fixed rho: at entry, after the other-variable
  // update, after each position block and after each auxiliary block.
  std::vector<double> substeps;
};

struct PenaltyResult {
  std::vector<IterationTrace> trace;
  bool converged = false;
  std::size_t iterations = 0;
  double rho_final = 0.0;
  double residual = 0.0;
  std::size_t degraded_projections = 0;
};

using ValueFn = std::function<double(std::span<const Position2D>)>;
using GradientFn = std::function<std::vector<Vec2>(std::span<const Position2D>)>;

struct PgdResult {
  std::vector<Position2D> positions;
  double initial_value = 0.0;
  double final_value = 0.0;
  std::size_t iterations = 0;
};

// r <- Project(r - eta * grad) with Armijo backtracking on eta, until the
// relative objective change drops below the tolerance or the iteration cap.
PgdResult projected_gradient_descent(const ValueFn& value, const GradientFn& gradient,
                                     std::vector<Position2D> start, const Panel& panel,
                                     const PgdOptions& options = {});

/// Central differences per coordinate.
std::vector<Vec2> finite_difference_gradient(const ValueFn& value,
                                             std::span<const Position2D> point,
                                             double step = 1e-6);

/// rho * sum over all groups of ||r - z||^2.
double penalty_term(const CasePlugin& plugin, double rho);
/// max over all antennas of ||r - z||.
double penalty_residual(const CasePlugin& plugin);
double penalized_objective(const CasePlugin& plugin, double rho);
/// position_gradient(group) plus 2 rho (r - z).
std::vector<Vec2> penalized_gradient(const CasePlugin& plugin, std::size_t group, double rho);

/// Uniform random r in each panel, then z from one sequential projection sweep.
void initialize_positions(CasePlugin& plugin, Rng& rng);

// One pass of exact separation projections over a group. Returns the number
// of degraded (grid fallback) projections.
std::size_t project_auxiliary(PositionGroup& group, const SeparationConstraint& d);

struct PenaltyOptions {
  PgdOptions pgd;
  bool randomize_start = true;
};

// Outer loop: other variables, position blocks, auxiliary blocks, then
// rho <- rho * growth. On exit the positions are snapped to z (always
// separated) and the other variables are refreshed once at those positions.
PenaltyResult run_penalty_ao(CasePlugin& plugin, const PenaltySchedule& schedule,
                             const StopRule& stop, Rng& rng, const PenaltyOptions& options = {});

/// One JSON object per outer iteration with keys outer, rho, f_pen, f_raw, resid, t_ms.
std::string trace_to_jsonl(std::span<const IterationTrace> trace);

}  // namespace maopt
