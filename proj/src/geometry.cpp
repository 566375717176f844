#include "maopt/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>

namespace maopt {

Panel Panel::centered_square(double side) { return centered_rect(side, side); }

Panel Panel::centered_rect(double width, double height) {
  if (!(width >= 0.0) || !(height >= 0.0)) {
    throw std::invalid_argument("Panel: extents must be non-negative");
  }
  return Panel{{-width / 2.0, -height / 2.0}, {width / 2.0, height / 2.0}};
}

Position2D Panel::project(const Position2D& p) const {
  return {std::min(std::max(p.x, min_corner.x), max_corner.x),
          std::min(std::max(p.y, min_corner.y), max_corner.y)};
}

bool Panel::contains(const Position2D& p, double tol) const {
  return p.x >= min_corner.x - tol && p.x <= max_corner.x + tol && p.y >= min_corner.y - tol &&
         p.y <= max_corner.y + tol;
}

std::vector<Position2D> circle_circle_intersections(const Position2D& c1, const Position2D& c2,
                                                    const SeparationConstraint& d) {
  const double sep2 = squared_distance(c1, c2);
  const double sep = std::sqrt(sep2);
  if (sep <= kPositionTolerance || sep > 2.0 * d.d_min) {
    return {};
  }
  const double h = 0.5 * std::sqrt(std::max(0.0, 4.0 * d.d_min * d.d_min / sep2 - 1.0));
  const Position2D mid = (c1 + c2) * 0.5;
  const Position2D normal{c2.y - c1.y, c1.x - c2.x};
  return {mid + h * normal, mid - h * normal};
}

std::vector<Position2D> line_circle_intersections(const Position2D& center,
                                                  const Position2D& through,
                                                  const SeparationConstraint& d) {
  const double len = distance(center, through);
  if (len <= kPositionTolerance) {
    return {};
  }
  const Position2D offset = (center - through) * (d.d_min / len);
  return {center + offset, center - offset};
}

std::vector<std::size_t> build_conflict_set(const Position2D& target,
                                            std::span<const Position2D> others,
                                            const SeparationConstraint& d) {
  std::vector<std::size_t> conflicts;
  const double d2 = d.d_min * d.d_min;
  for (std::size_t l = 0; l < others.size(); ++l) {
    if (squared_distance(target, others[l]) < d2) {
      conflicts.push_back(l);
    }
  }
  return conflicts;
}

bool is_separated(const Position2D& p, std::span<const Position2D> others,
                  const SeparationConstraint& d, double slack) {
  const double limit = d.d_min - slack;
  for (const auto& o : others) {
    if (distance(p, o) < limit) {
      return false;
    }
  }
  return true;
}

CandidateSet build_candidate_set(const Position2D& target, std::span<const Position2D> others,
                                 const SeparationConstraint& d,
                                 std::span<const std::size_t> circles) {
  CandidateSet set;
  set.conflict_indices.assign(circles.begin(), circles.end());
  for (const std::size_t l : circles) {
    for (std::size_t k = 0; k < others.size(); ++k) {
      if (k == l) continue;
      for (const auto& w : circle_circle_intersections(others[l], others[k], d)) {
        if (is_separated(w, others, d)) {
          set.candidates.push_back({w, CandidateSource::CircleCircle, l});
        }
      }
    }
    for (const auto& u : line_circle_intersections(others[l], target, d)) {
      if (is_separated(u, others, d)) {
        set.candidates.push_back({u, CandidateSource::LineCircle, l});
      }
    }
  }
  return set;
}

namespace {

constexpr double kTieTolerance = 1e-14;

// Strict weak "closer to target" order; equidistant points break ties by (x, y).
bool closer(const Position2D& a, const Position2D& b, const Position2D& target) {
  const double da = squared_distance(a, target);
  const double db = squared_distance(b, target);
  if (std::abs(da - db) > kTieTolerance) return da < db;
  if (a.x != b.x) return a.x < b.x;
  return a.y < b.y;
}

const Candidate* best_candidate(const CandidateSet& set, const Position2D& target) {
  const Candidate* best = nullptr;
  for (const auto& c : set.candidates) {
    if (best == nullptr || closer(c.position, best->position, target)) best = &c;
  }
  return best;
}

}  // namespace

ProjectionResult solve_separation_projection(const Position2D& target,
                                             std::span<const Position2D> others,
                                             const SeparationConstraint& d) {
  ProjectionResult result;
  const auto conflicts = build_conflict_set(target, others, d);
  result.conflict_count = conflicts.size();
  if (conflicts.empty()) {
    result.point = target;
    return result;
  }

  const CandidateSet primary = build_candidate_set(target, others, d, conflicts);
  result.candidate_count = primary.candidates.size();

  if (const Candidate* best = best_candidate(primary, target)) {
    result.point = best->position;
    result.route = ProjectionRoute::ConflictCircles;
    // A circle-circle vertex closer than `best` can only involve circles whose
    // centers lie within |best - target| + D of the target; examine those too.
    const double reach = distance(best->position, target) + d.d_min;
    std::vector<std::size_t> nearby;
    for (std::size_t k = 0; k < others.size(); ++k) {
      if (distance(others[k], target) < reach &&
          !std::binary_search(conflicts.begin(), conflicts.end(), k)) {
        nearby.push_back(k);
      }
    }
    result.certified_circles = nearby.size();
    if (!nearby.empty()) {
      const CandidateSet extra = build_candidate_set(target, others, d, nearby);
      if (const Candidate* e = best_candidate(extra, target);
          e != nullptr && closer(e->position, result.point, target)) {
        result.point = e->position;
      }
    }
    return result;
  }

  std::vector<std::size_t> all(others.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  const CandidateSet enlarged = build_candidate_set(target, others, d, all);
  if (const Candidate* best = best_candidate(enlarged, target)) {
    result.point = best->position;
    result.route = ProjectionRoute::AllCircles;
    return result;
  }

  result.point = brute_force_projection_oracle(target, others, d, d.d_min / 400.0);
  result.route = ProjectionRoute::GridFallback;
  result.degraded = true;
  return result;
}

Position2D brute_force_projection_oracle(const Position2D& target,
                                         std::span<const Position2D> others,
                                         const SeparationConstraint& d, double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("brute_force_projection_oracle: resolution must be positive");
  }
  Position2D lo = target;
  Position2D hi = target;
  for (const auto& o : others) {
    lo = {std::min(lo.x, o.x), std::min(lo.y, o.y)};
    hi = {std::max(hi.x, o.x), std::max(hi.y, o.y)};
  }
  const double pad = 2.5 * d.d_min;
  lo -= Position2D{pad, pad};
  hi += Position2D{pad, pad};

  const auto nx = static_cast<std::int64_t>(std::floor((hi.x - lo.x) / resolution));
  const auto ny = static_cast<std::int64_t>(std::floor((hi.y - lo.y) / resolution));
  const double d2 = d.d_min * d.d_min;

  auto feasible = [&](const Position2D& p) {
    for (const auto& o : others) {
      if (squared_distance(p, o) < d2) return false;
    }
    return true;
  };

  // Each row is scanned analytically: the infeasible part of a row is a union
  // of open intervals, so the nearest feasible grid point is either the grid
  // point nearest the target or sits next to an interval endpoint.
  bool found = false;
  Position2D best;
  std::vector<std::int64_t> cols;
  for (std::int64_t j = 0; j <= ny; ++j) {
    const double y = lo.y + static_cast<double>(j) * resolution;
    cols.clear();
    auto add_around = [&](double x) {
      const auto c = static_cast<std::int64_t>(std::floor((x - lo.x) / resolution));
      for (std::int64_t k = c - 1; k <= c + 2; ++k) {
        cols.push_back(std::clamp<std::int64_t>(k, 0, nx));
      }
    };
    add_around(target.x);
    for (const auto& o : others) {
      const double dy = y - o.y;
      if (dy * dy >= d2) continue;
      const double w = std::sqrt(d2 - dy * dy);
      add_around(o.x - w);
      add_around(o.x + w);
    }
    for (const auto i : cols) {
      const Position2D p{lo.x + static_cast<double>(i) * resolution, y};
      if (!feasible(p)) continue;
      if (!found || closer(p, best, target)) {
        best = p;
        found = true;
      }
    }
  }
  if (!found) {
    throw NoFeasibleGridPoint("brute_force_projection_oracle: no feasible grid point");
  }
  return best;
}

double min_pairwise_distance(std::span<const Position2D> points) {
  if (points.size() < 2) {
    throw TooFewPoints("min_pairwise_distance: need at least two points");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, distance(points[i], points[j]));
    }
  }
  return best;
}

FeasibleRaster label_feasible_components(std::size_t target_index,
                                         std::span<const Position2D> positions,
                                         const Panel& panel, const SeparationConstraint& d,
                                         double resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("label_feasible_components: resolution must be positive");
  }
  FeasibleRaster r;
  r.panel = panel;
  r.nx = static_cast<std::size_t>(std::max(1L, std::lround(panel.width() / resolution)));
  r.ny = static_cast<std::size_t>(std::max(1L, std::lround(panel.height() / resolution)));
  r.cell_w = panel.width() / static_cast<double>(r.nx);
  r.cell_h = panel.height() / static_cast<double>(r.ny);
  const double d2 = d.d_min * d.d_min;

  constexpr int kUnvisited = -2;
  r.labels.assign(r.nx * r.ny, FeasibleRaster::kBlocked);
  for (std::size_t j = 0; j < r.ny; ++j) {
    for (std::size_t i = 0; i < r.nx; ++i) {
      const Position2D c = r.cell_center(i, j);
      bool free = true;
      for (std::size_t k = 0; k < positions.size() && free; ++k) {
        if (k != target_index && squared_distance(c, positions[k]) < d2) free = false;
      }
      if (free) r.labels[j * r.nx + i] = kUnvisited;
    }
  }

  std::queue<std::size_t> frontier;
  for (std::size_t start = 0; start < r.labels.size(); ++start) {
    if (r.labels[start] != kUnvisited) continue;
    const int label = static_cast<int>(r.component_cells.size());
    r.component_cells.push_back(0);
    r.labels[start] = label;
    frontier.push(start);
    while (!frontier.empty()) {
      const std::size_t idx = frontier.front();
      frontier.pop();
      ++r.component_cells.back();
      const std::size_t i = idx % r.nx;
      const std::size_t j = idx / r.nx;
      auto visit = [&](std::size_t n) {
        if (r.labels[n] == kUnvisited) {
          r.labels[n] = label;
          frontier.push(n);
        }
      };
      if (i > 0) visit(idx - 1);
      if (i + 1 < r.nx) visit(idx + 1);
      if (j > 0) visit(idx - r.nx);
      if (j + 1 < r.ny) visit(idx + r.nx);
    }
  }
  return r;
}

Position2D FeasibleRaster::cell_center(std::size_t i, std::size_t j) const {
  return {panel.min_corner.x + (static_cast<double>(i) + 0.5) * cell_w,
          panel.min_corner.y + (static_cast<double>(j) + 0.5) * cell_h};
}

int FeasibleRaster::label_near(const Position2D& p) const {
  const auto clamp_index = [](double v, std::size_t n) {
    return static_cast<long>(std::clamp(std::floor(v), 0.0, static_cast<double>(n - 1)));
  };
  const long ci = clamp_index((p.x - panel.min_corner.x) / cell_w, nx);
  const long cj = clamp_index((p.y - panel.min_corner.y) / cell_h, ny);
  // a separated point can sit in a cell whose center is just blocked
  int best = kBlocked;
  double best_d = std::numeric_limits<double>::infinity();
  for (long j = std::max(0L, cj - 2); j <= std::min<long>(static_cast<long>(ny) - 1, cj + 2); ++j) {
    for (long i = std::max(0L, ci - 2); i <= std::min<long>(static_cast<long>(nx) - 1, ci + 2); ++i) {
      const int l = labels[static_cast<std::size_t>(j) * nx + static_cast<std::size_t>(i)];
      if (l < 0) continue;
      const double dd = squared_distance(cell_center(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), p);
      if (dd < best_d) {
        best_d = dd;
        best = l;
      }
    }
  }
  return best;
}

std::size_t count_feasible_components(std::size_t target_index,
                                      std::span<const Position2D> positions, const Panel& panel,
                                      const SeparationConstraint& d, double resolution) {
  return label_feasible_components(target_index, positions, panel, d, resolution).components();
}

long conservative_capacity(double panel_extent, double subset_extent,
                           const SeparationConstraint& d) {
  if (!(panel_extent > 0.0) || !(subset_extent > 0.0)) {
    throw std::invalid_argument("conservative_capacity: extents must be positive");
  }
  // Inputs are frequently exact multiples of D; keep 3.0 from rounding to 2.999...
  const double ratio = (panel_extent + d.d_min) / (subset_extent + d.d_min);
  return static_cast<long>(std::floor(ratio + 1e-9));
}

long conservative_capacity(double panel_w, double panel_h, double subset_w, double subset_h,
                           const SeparationConstraint& d) {
  return conservative_capacity(panel_w, subset_w, d) * conservative_capacity(panel_h, subset_h, d);
}

}  // namespace maopt
