#include "maopt/penalty.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include <json.hpp>

namespace maopt {

namespace {

double relative_change(double current, double previous) {
  return std::abs(current - previous) / std::max(std::abs(previous), 1e-300);
}

}  // namespace

void PenaltySchedule::validate() const {
  if (!(rho_init > 0.0)) throw std::invalid_argument("PenaltySchedule: rho_init must be > 0");
  if (!(growth > 1.0)) throw std::invalid_argument("PenaltySchedule: growth must be > 1");
}

void StopRule::validate() const {
  if (!(rel_change_tol > 0.0) || !(residual_tol > 0.0) || max_outer_iters == 0) {
    throw std::invalid_argument("StopRule: tolerances and iteration cap must be positive");
  }
}

std::size_t CasePlugin::optimize_other_vars(double rel_tol, std::size_t max_rounds) {
  double previous = objective();
  std::size_t rounds = 0;
  while (rounds < max_rounds) {
    update_other_vars();
    ++rounds;
    const double current = objective();
    const bool settled = relative_change(current, previous) < rel_tol;
    previous = current;
    if (settled) break;
  }
  return rounds;
}

void CasePlugin::set_positions(std::size_t group, std::vector<Position2D> positions) {
  auto& g = groups_.at(group);
  g.z = positions;
  g.r = std::move(positions);
}

PgdResult projected_gradient_descent(const ValueFn& value, const GradientFn& gradient,
                                     std::vector<Position2D> start, const Panel& panel,
                                     const PgdOptions& options) {
  PgdResult out;
  for (auto& p : start) p = panel.project(p);
  out.positions = std::move(start);
  double f = value(out.positions);
  out.initial_value = f;

  std::vector<Position2D> trial(out.positions.size());
  for (std::size_t it = 0; it < options.max_iters; ++it) {
    const auto g = gradient(out.positions);
    for (const auto& gi : g) {
      if (!gi.is_finite()) throw NonFiniteGradient("projected_gradient_descent: gradient is not finite");
    }

    double eta = options.step0;
    bool accepted = false;
    double f_trial = f;
    for (int bt = 0; bt < options.max_backtracks; ++bt, eta *= options.shrink) {
      double predicted = 0.0;  // g . (trial - x), non-positive for a projected step
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] = panel.project(out.positions[i] - eta * g[i]);
        predicted += g[i].dot(trial[i] - out.positions[i]);
      }
      if (predicted == 0.0) break;  // projected stationary point
      f_trial = value(trial);
      if (std::isfinite(f_trial) && f_trial <= f + options.armijo_c * predicted) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const double rel = relative_change(f_trial, f);
    out.positions = trial;
    f = f_trial;
    ++out.iterations;
    if (rel < options.rel_change_tol) break;
  }
  out.final_value = f;
  return out;
}

std::vector<Vec2> finite_difference_gradient(const ValueFn& value,
                                             std::span<const Position2D> point, double step) {
  std::vector<Position2D> x(point.begin(), point.end());
  std::vector<Vec2> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Position2D saved = x[i];
    x[i].x = saved.x + step;
    const double fxp = value(x);
    x[i].x = saved.x - step;
    const double fxm = value(x);
    x[i] = saved;
    x[i].y = saved.y + step;
    const double fyp = value(x);
    x[i].y = saved.y - step;
    const double fym = value(x);
    x[i] = saved;
    g[i] = {(fxp - fxm) / (2.0 * step), (fyp - fym) / (2.0 * step)};
  }
  return g;
}

double penalty_term(const CasePlugin& plugin, double rho) {
  double sum = 0.0;
  for (const auto& g : plugin.groups()) {
    for (std::size_t m = 0; m < g.r.size(); ++m) sum += squared_distance(g.r[m], g.z[m]);
  }
  return rho * sum;
}

double penalty_residual(const CasePlugin& plugin) {
  double worst = 0.0;
  for (const auto& g : plugin.groups()) {
    for (std::size_t m = 0; m < g.r.size(); ++m) worst = std::max(worst, distance(g.r[m], g.z[m]));
  }
  return worst;
}

double penalized_objective(const CasePlugin& plugin, double rho) {
  return plugin.objective() + penalty_term(plugin, rho);
}

std::vector<Vec2> penalized_gradient(const CasePlugin& plugin, std::size_t group, double rho) {
  const auto& g = plugin.groups().at(group);
  auto grad = plugin.position_gradient(group);
  for (std::size_t m = 0; m < grad.size(); ++m) grad[m] += 2.0 * rho * (g.r[m] - g.z[m]);
  return grad;
}

std::size_t project_auxiliary(PositionGroup& group, const SeparationConstraint& d) {
  std::size_t degraded = 0;
  if (group.z.size() != group.r.size()) {
    // First sweep: each z_m only has to respect the already assigned ones.
    group.z.clear();
    for (const auto& r : group.r) {
      const auto res = solve_separation_projection(r, group.z, d);
      degraded += res.degraded ? 1 : 0;
      group.z.push_back(res.point);
    }
    return degraded;
  }

  std::vector<Position2D> others;
  others.reserve(group.z.size());
  for (std::size_t m = 0; m < group.r.size(); ++m) {
    others.clear();
    for (std::size_t l = 0; l < group.z.size(); ++l) {
      if (l != m) others.push_back(group.z[l]);
    }
    const auto res = solve_separation_projection(group.r[m], others, d);
    if (res.degraded) {
      ++degraded;
      // The grid answer is approximate; never trade a feasible z for a worse one.
      if (is_separated(group.z[m], others, d) &&
          squared_distance(group.z[m], group.r[m]) <= squared_distance(res.point, group.r[m])) {
        continue;
      }
    }
    group.z[m] = res.point;
  }
  return degraded;
}

void initialize_positions(CasePlugin& plugin, Rng& rng) {
  for (auto& g : plugin.groups()) {
    std::uniform_real_distribution<double> ux(g.panel.min_corner.x, g.panel.max_corner.x);
    std::uniform_real_distribution<double> uy(g.panel.min_corner.y, g.panel.max_corner.y);
    for (auto& r : g.r) {
      const double x = ux(rng);
      const double y = uy(rng);
      r = {x, y};
    }
    g.z.clear();
    project_auxiliary(g, plugin.separation());
  }
}

PenaltyResult run_penalty_ao(CasePlugin& plugin, const PenaltySchedule& schedule,
                             const StopRule& stop, Rng& rng, const PenaltyOptions& options) {
  schedule.validate();
  stop.validate();
  const auto& d = plugin.separation();
  if (options.randomize_start) {
    initialize_positions(plugin, rng);
  } else {
    for (auto& g : plugin.groups()) {
      if (g.z.size() != g.r.size()) project_auxiliary(g, d);
    }
  }

  PenaltyResult result;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < stop.max_outer_iters; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const double rho = schedule.rho(k);
    IterationTrace it;
    it.outer = k;
    it.rho = rho;
    it.substeps.push_back(penalized_objective(plugin, rho));

    plugin.update_other_vars();
    it.substeps.push_back(penalized_objective(plugin, rho));

    auto& groups = plugin.groups();
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      auto& group = groups[gi];
      const ValueFn value = [&](std::span<const Position2D> x) {
        group.r.assign(x.begin(), x.end());
        return penalized_objective(plugin, rho);
      };
      const GradientFn gradient = [&](std::span<const Position2D> x) {
        group.r.assign(x.begin(), x.end());
        return penalized_gradient(plugin, gi, rho);
      };
      auto pgd = projected_gradient_descent(value, gradient, group.r, group.panel, options.pgd);
      group.r = std::move(pgd.positions);
      it.substeps.push_back(penalized_objective(plugin, rho));
    }

    for (auto& group : groups) {
      result.degraded_projections += project_auxiliary(group, d);
      it.substeps.push_back(penalized_objective(plugin, rho));
    }

    it.f_pen = it.substeps.back();
    it.f_raw = plugin.objective();
    it.resid = penalty_residual(plugin);
    it.t_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.trace.push_back(it);

    if (k > 0 && relative_change(it.f_pen, previous) < stop.rel_change_tol &&
        it.resid <= stop.residual_tol) {
      result.converged = true;
      break;
    }
    previous = it.f_pen;
  }

  result.iterations = result.trace.size();
  result.rho_final = result.trace.back().rho;
  result.residual = result.trace.back().resid;
  for (auto& g : plugin.groups()) g.r = g.z;
  plugin.update_other_vars();
  return result;
}

std::string trace_to_jsonl(std::span<const IterationTrace> trace) {
  std::string out;
  for (const auto& it : trace) {
    nlohmann::ordered_json j;
    j["outer"] = it.outer;
    j["rho"] = it.rho;
    j["f_pen"] = it.f_pen;
    j["f_raw"] = it.f_raw;
    j["resid"] = it.resid;
    j["t_ms"] = it.t_ms;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace maopt
