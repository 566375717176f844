#include "maopt/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maopt {

std::vector<Position2D> fpa_layout(std::size_t count, double spacing) {
  if (count == 0) return {};
  const auto rows = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(count))));
  const std::size_t cols = (count + rows - 1) / rows;
  const double x0 = -0.5 * spacing * static_cast<double>(cols - 1);
  const double y0 = -0.5 * spacing * static_cast<double>(rows - 1);
  std::vector<Position2D> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({x0 + spacing * static_cast<double>(i % cols),
                   y0 + spacing * static_cast<double>(i / cols)});
  }
  return out;
}

std::vector<Position2D> candidate_grid(std::size_t rows, std::size_t cols, double spacing,
                                       const Position2D& center) {
  std::vector<Position2D> out;
  const double x0 = center.x - 0.5 * spacing * static_cast<double>(cols - 1);
  const double y0 = center.y - 0.5 * spacing * static_cast<double>(rows - 1);
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t i = 0; i < cols; ++i) {
      out.push_back({x0 + spacing * static_cast<double>(i), y0 + spacing * static_cast<double>(j)});
    }
  }
  return out;
}

std::size_t for_each_combination(std::size_t n, std::size_t k,
                                 const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return 0;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::size_t visited = 0;
  while (true) {
    fn(idx);
    ++visited;
    // advance to the next subset in lexicographic order
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return visited;
}

SelectionResult antenna_selection(const std::vector<std::size_t>& candidates,
                                  const std::vector<std::size_t>& select,
                                  const SelectionObjective& objective,
                                  const SelectionConfig& config) {
  if (candidates.size() != select.size() || candidates.empty()) {
    throw std::invalid_argument("antenna_selection: one candidate count per side required");
  }
  for (std::size_t s = 0; s < select.size(); ++s) {
    if (select[s] > candidates[s]) {
      throw std::invalid_argument("antenna_selection: cannot select more antennas than candidates");
    }
  }

  SelectionResult res;
  res.chosen.resize(select.size());
  for (std::size_t s = 0; s < select.size(); ++s) {
    for (std::size_t i = 0; i < select[s]; ++i) res.chosen[s].push_back(i);
  }
  res.value = objective(res.chosen);
  res.initial_value = res.value;
  res.evaluations = 1;

  if (config.mode == SelectionMode::Joint) {
    Selection current(select.size());
    std::function<void(std::size_t)> recurse = [&](std::size_t side) {
      if (side == select.size()) {
        const double v = objective(current);
        ++res.evaluations;
        if (v < res.value) {
          res.value = v;
          res.chosen = current;
        }
        return;
      }
      for_each_combination(candidates[side], select[side], [&](const std::vector<std::size_t>& c) {
        current[side] = c;
        recurse(side + 1);
      });
    };
    recurse(0);
    return res;
  }

  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t side = 0; side < select.size(); ++side) {
      Selection trial = res.chosen;
      Selection best = res.chosen;
      double best_value = res.value;
      for_each_combination(candidates[side], select[side], [&](const std::vector<std::size_t>& c) {
        trial[side] = c;
        const double v = objective(trial);
        ++res.evaluations;
        if (v < best_value) {
          best_value = v;
          best = trial;
        }
      });
      res.chosen = std::move(best);
      res.value = best_value;
    }
  }
  return res;
}

void PsoConfig::validate() const {
  if (swarm == 0 || iterations == 0) throw std::invalid_argument("PsoConfig: swarm and iterations must be positive");
  if (!(inertia > 0.0) || !(cognitive > 0.0) || !(social > 0.0) || !(penalty_scale > 0.0)) {
    throw std::invalid_argument("PsoConfig: weights must be positive");
  }
}

double separation_violation(std::span<const Position2D> positions,
                            const std::vector<PsoBlock>& blocks, const SeparationConstraint& d) {
  double total = 0.0;
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.count; ++i) {
      for (std::size_t j = i + 1; j < b.count; ++j) {
        const double gap = d.d_min - distance(positions[offset + i], positions[offset + j]);
        if (gap > 0.0) total += gap * gap;
      }
    }
    offset += b.count;
  }
  return total;
}

PsoResult pso_optimize(const FlatObjective& objective, const std::vector<PsoBlock>& blocks,
                       const SeparationConstraint& d, const PsoConfig& config, Rng& rng) {
  config.validate();
  std::vector<Panel> panel_of;
  for (const auto& b : blocks) panel_of.insert(panel_of.end(), b.count, b.panel);
  const std::size_t dim = panel_of.size();
  if (dim == 0) throw std::invalid_argument("pso_optimize: nothing to optimize");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto clamp_to_panel = [&](std::vector<Position2D>& x) {
    for (std::size_t i = 0; i < dim; ++i) x[i] = panel_of[i].project(x[i]);
  };

  std::vector<std::vector<Position2D>> x(config.swarm, std::vector<Position2D>(dim));
  std::vector<std::vector<Position2D>> v(config.swarm, std::vector<Position2D>(dim));
  for (std::size_t p = 0; p < config.swarm; ++p) {
    for (std::size_t i = 0; i < dim; ++i) {
      const Panel& pan = panel_of[i];
      const double px = pan.min_corner.x + unit(rng) * pan.width();
      const double py = pan.min_corner.y + unit(rng) * pan.height();
      x[p][i] = {px, py};
      const double vx = (unit(rng) - 0.5) * 0.2 * pan.width();
      const double vy = (unit(rng) - 0.5) * 0.2 * pan.height();
      v[p][i] = {vx, vy};
    }
  }

  PsoResult out;
  const double f0 = objective(x[0]);
  out.penalty_weight = config.penalty_scale * (std::isfinite(f0) && f0 != 0.0 ? std::abs(f0) : 1.0);
  auto fitness = [&](const std::vector<Position2D>& pos, double* raw) {
    const double f = objective(pos);
    if (raw != nullptr) *raw = f;
    const double fit = f + out.penalty_weight * separation_violation(pos, blocks, d);
    return std::isfinite(fit) ? fit : std::numeric_limits<double>::max();
  };

  std::vector<std::vector<Position2D>> pbest = x;
  std::vector<double> pbest_fit(config.swarm);
  std::vector<double> pbest_raw(config.swarm);
  std::size_t g = 0;
  for (std::size_t p = 0; p < config.swarm; ++p) {
    pbest_fit[p] = fitness(x[p], &pbest_raw[p]);
    if (pbest_fit[p] < pbest_fit[g]) g = p;
  }
  std::vector<Position2D> gbest = pbest[g];
  double gbest_fit = pbest_fit[g];
  double gbest_raw = pbest_raw[g];

  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (std::size_t p = 0; p < config.swarm; ++p) {
      for (std::size_t i = 0; i < dim; ++i) {
        const double r1x = unit(rng);
        const double r1y = unit(rng);
        const double r2x = unit(rng);
        const double r2y = unit(rng);
        Position2D& vi = v[p][i];
        vi.x = config.inertia * vi.x + config.cognitive * r1x * (pbest[p][i].x - x[p][i].x) +
               config.social * r2x * (gbest[i].x - x[p][i].x);
        vi.y = config.inertia * vi.y + config.cognitive * r1y * (pbest[p][i].y - x[p][i].y) +
               config.social * r2y * (gbest[i].y - x[p][i].y);
        // speed limit: one panel extent per step
        vi.x = std::clamp(vi.x, -panel_of[i].width(), panel_of[i].width());
        vi.y = std::clamp(vi.y, -panel_of[i].height(), panel_of[i].height());
        x[p][i] += vi;
      }
      clamp_to_panel(x[p]);
      double raw = 0.0;
      const double fit = fitness(x[p], &raw);
      if (fit < pbest_fit[p]) {
        pbest_fit[p] = fit;
        pbest_raw[p] = raw;
        pbest[p] = x[p];
        if (fit < gbest_fit) {
          gbest_fit = fit;
          gbest_raw = raw;
          gbest = x[p];
        }
      }
    }
  }

  out.positions = std::move(gbest);
  out.fitness = gbest_fit;
  out.objective = gbest_raw;
  out.feasible = true;
  std::size_t offset = 0;
  for (const auto& b : blocks) {
    if (b.count >= 2) {
      const std::span<const Position2D> blk(out.positions.data() + offset, b.count);
      if (min_pairwise_distance(blk) < d.d_min - kSeparationSlack) out.feasible = false;
    }
    offset += b.count;
  }
  return out;
}

namespace {

double evaluate_at(CasePlugin& plugin) {
  plugin.reset_other_vars();
  plugin.optimize_other_vars();
  return plugin.objective();
}

}  // namespace

CaseOutcome run_fpa(CasePlugin& plugin, double spacing) {
  for (std::size_t g = 0; g < plugin.groups().size(); ++g) {
    plugin.set_positions(g, fpa_layout(plugin.groups()[g].r.size(), spacing));
  }
  evaluate_at(plugin);
  return outcome_from(plugin);
}

CaseOutcome run_antenna_selection(CasePlugin& plugin, const SelectionConfig& config,
                                  double spacing) {
  auto& groups = plugin.groups();
  std::vector<std::vector<Position2D>> grids;
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> select;
  for (const auto& g : groups) {
    const std::size_t k = g.r.size();
    grids.push_back(candidate_grid(2, k, spacing, g.panel.center()));
    candidates.push_back(2 * k);
    select.push_back(k);
  }
  auto apply = [&](const Selection& sel) {
    for (std::size_t s = 0; s < sel.size(); ++s) {
      std::vector<Position2D> pos;
      for (const std::size_t i : sel[s]) pos.push_back(grids[s][i]);
      plugin.set_positions(s, std::move(pos));
    }
  };
  const auto res = antenna_selection(
      candidates, select,
      [&](const Selection& sel) {
        apply(sel);
        return evaluate_at(plugin);
      },
      config);
  apply(res.chosen);
  evaluate_at(plugin);
  return outcome_from(plugin);
}

CaseOutcome run_pso(CasePlugin& plugin, const PsoConfig& config, Rng& rng) {
  auto& groups = plugin.groups();
  std::vector<PsoBlock> blocks;
  for (const auto& g : groups) blocks.push_back({g.panel, g.r.size()});
  auto apply = [&](std::span<const Position2D> flat) {
    std::size_t offset = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const std::size_t n = groups[g].r.size();
      plugin.set_positions(g, std::vector<Position2D>(flat.begin() + static_cast<long>(offset),
                                                      flat.begin() + static_cast<long>(offset + n)));
      offset += n;
    }
  };
  const auto res = pso_optimize(
      [&](std::span<const Position2D> flat) {
        apply(flat);
        return evaluate_at(plugin);
      },
      blocks, plugin.separation(), config, rng);
  apply(res.positions);
  evaluate_at(plugin);
  return outcome_from(plugin);
}

}  // namespace maopt
