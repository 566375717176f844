#pragma once

// Planar geometry of minimum-separation constraints between antennas.
// All lengths are in carrier wavelengths.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maopt {

struct Position2D {
  double x = 0.0;
  double y = 0.0;

  constexpr Position2D() = default;
  constexpr Position2D(double x_, double y_) : x(x_), y(y_) {}

  constexpr Position2D& operator+=(const Position2D& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Position2D& operator-=(const Position2D& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Position2D& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Position2D operator+(Position2D a, const Position2D& b) { return a += b; }
  friend constexpr Position2D operator-(Position2D a, const Position2D& b) { return a -= b; }
  friend constexpr Position2D operator*(Position2D a, double s) { return a *= s; }
  friend constexpr Position2D operator*(double s, Position2D a) { return a *= s; }
  friend constexpr bool operator==(const Position2D&, const Position2D&) = default;

  [[nodiscard]] constexpr double dot(const Position2D& o) const { return x * o.x + y * o.y; }
  [[nodiscard]] constexpr double squared_norm() const { return x * x + y * y; }
  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] bool is_finite() const { return std::isfinite(x) && std::isfinite(y); }
};

/// Absolute tolerance for treating two positions as the same point.
inline constexpr double kPositionTolerance = 1e-12;
/// Slack on the ">= D" side of the separation test for candidate points.
inline constexpr double kSeparationSlack = 1e-9;

inline double distance(const Position2D& a, const Position2D& b) { return (a - b).norm(); }
inline double squared_distance(const Position2D& a, const Position2D& b) {
  return (a - b).squared_norm();
}
inline bool approx_equal(const Position2D& a, const Position2D& b,
                         double tol = kPositionTolerance) {
  return distance(a, b) <= tol;
}

/// Axis-aligned rectangular movement region.
struct Panel {
  Position2D min_corner;
  Position2D max_corner;

  /// A x A square centered at the origin.
  static Panel centered_square(double side);
  static Panel centered_rect(double width, double height);

  [[nodiscard]] Position2D project(const Position2D& p) const;
  [[nodiscard]] bool contains(const Position2D& p, double tol = 0.0) const;
  [[nodiscard]] double width() const { return max_corner.x - min_corner.x; }
  [[nodiscard]] double height() const { return max_corner.y - min_corner.y; }
  [[nodiscard]] Position2D center() const { return (min_corner + max_corner) * 0.5; }
};

struct SeparationConstraint {
  double d_min;

  explicit SeparationConstraint(double d) : d_min(d) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("SeparationConstraint: d_min must be positive");
    }
  }
};

enum class CandidateSource { CircleCircle, LineCircle };

struct Candidate {
  Position2D position;
  CandidateSource source;
  std::size_t circle;  // index (into `others`) of the circle the point lies on
};

struct CandidateSet {
  std::vector<std::size_t> conflict_indices;
  std::vector<Candidate> candidates;
};

class NoFeasibleGridPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooFewPoints : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Intersections of the two radius-D circles centered at c1 and c2. Empty for
// coincident centers or centers more than 2D apart.
std::vector<Position2D> circle_circle_intersections(const Position2D& c1, const Position2D& c2,
                                                    const SeparationConstraint& d);

// Intersections of the radius-D circle at `center` with the line through
// `center` and `through`. Empty when the two points coincide.
std::vector<Position2D> line_circle_intersections(const Position2D& center,
                                                  const Position2D& through,
                                                  const SeparationConstraint& d);

/// Indices of `others` strictly closer than d_min to `target`.
std::vector<std::size_t> build_conflict_set(const Position2D& target,
                                            std::span<const Position2D> others,
                                            const SeparationConstraint& d);

/// True when p is at least d_min - slack from every point in `others`.
bool is_separated(const Position2D& p, std::span<const Position2D> others,
                  const SeparationConstraint& d, double slack = kSeparationSlack);

/// W_l and U_l for every l in the conflict set, after separation filtering.
CandidateSet build_candidate_set(const Position2D& target, std::span<const Position2D> others,
                                 const SeparationConstraint& d,
                                 std::span<const std::size_t> circles);

enum class ProjectionRoute {
  Unconstrained,     // conflict set empty, target returned unchanged
  ConflictCircles,   // best point on the conflict circles
  AllCircles,        // conflict-circle candidates were all infeasible; every circle used
  GridFallback,      // no candidate survived; grid search answer (degraded precision)
};

struct ProjectionResult {
  Position2D point;
  ProjectionRoute route = ProjectionRoute::Unconstrained;
  bool degraded = false;
  std::size_t conflict_count = 0;
  /// Size of the filtered candidate set built from the conflict circles alone.
  std::size_t candidate_count = 0;
  /// Extra circles examined when checking for closer circle-circle vertices.
  std::size_t certified_circles = 0;
};

/// Nearest point to `target` that keeps distance >= d_min to every point of `others`.
ProjectionResult solve_separation_projection(const Position2D& target,
                                             std::span<const Position2D> others,
                                             const SeparationConstraint& d);

/// Grid search over the bounding box of {target} U others inflated by 2.5 d_min.
/// Returns the feasible grid point nearest to `target`.
Position2D brute_force_projection_oracle(const Position2D& target,
                                         std::span<const Position2D> others,
                                         const SeparationConstraint& d, double resolution);

double min_pairwise_distance(std::span<const Position2D> points);

inline constexpr double kDefaultConnectivityResolution = 0.01;

/// Raster of the free region of one antenna with 4-connected component labels.
struct FeasibleRaster {
  static constexpr int kBlocked = -1;

  Panel panel;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double cell_w = 0.0;
  double cell_h = 0.0;
  std::vector<int> labels;                 // row-major, kBlocked or a component index
  std::vector<std::size_t> component_cells;

  [[nodiscard]] std::size_t components() const { return component_cells.size(); }
  [[nodiscard]] Position2D cell_center(std::size_t i, std::size_t j) const;
  /// Component of the nearest free cell within two cells of p, or kBlocked.
  [[nodiscard]] int label_near(const Position2D& p) const;
};

FeasibleRaster label_feasible_components(std::size_t target_index,
                                         std::span<const Position2D> positions,
                                         const Panel& panel, const SeparationConstraint& d,
                                         double resolution = kDefaultConnectivityResolution);

// Number of 4-connected components of the raster cells of `panel` whose
// centers are at least d_min away from every antenna other than target_index.
std::size_t count_feasible_components(std::size_t target_index,
                                      std::span<const Position2D> positions, const Panel& panel,
                                      const SeparationConstraint& d,
                                      double resolution = kDefaultConnectivityResolution);

/// Antennas a conservative box partition can hold: floor((A+D)/(B+D)).
long conservative_capacity(double panel_extent, double subset_extent,
                           const SeparationConstraint& d);
/// Two-dimensional version: product of the per-axis counts.
long conservative_capacity(double panel_w, double panel_h, double subset_w, double subset_h,
                           const SeparationConstraint& d);

}  // namespace maopt
