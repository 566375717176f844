#pragma once

// Far-field field-response channel model H = F^H Sigma G and the geometric
// random channel generator. Lengths are in wavelengths (lambda = 1).

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "maopt/geometry.hpp"

namespace maopt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Rng = std::mt19937_64;

inline constexpr double kWaveNumber = 2.0 * std::numbers::pi;  // 2*pi/lambda with lambda = 1

enum class Side { Tx, Rx };

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Elevation/azimuth pairs of the paths seen from one side of the link.
struct PathAngles {
  std::vector<double> elevation;
  std::vector<double> azimuth;

  [[nodiscard]] std::size_t size() const { return elevation.size(); }
  /// sin(theta) cos(phi) per path: the x-direction cosine.
  [[nodiscard]] Eigen::VectorXd alpha() const;
  /// cos(theta) per path: the y-direction cosine.
  [[nodiscard]] Eigen::VectorXd beta() const;
};

struct ChannelRealization {
  PathAngles tx;
  PathAngles rx;
  CMatrix sigma;  // L_r x L_t path response matrix
  double kappa = 1.0;

  [[nodiscard]] std::size_t num_paths() const { return rx.size(); }
  [[nodiscard]] const PathAngles& angles(Side side) const { return side == Side::Tx ? tx : rx; }
};

/// exp{j 2pi (sin(theta_q) cos(phi_q) x + cos(theta_q) y)} for every path q.
CVector field_response_vector(const Position2D& pos, const PathAngles& angles);
CVector field_response_vector(const Position2D& pos, const ChannelRealization& channel,
                              Side side);

/// Columns are the field response vectors of `positions` (L x count).
CMatrix field_response_matrix(std::span<const Position2D> positions, const PathAngles& angles);

/// M x N channel F^H Sigma G for N transmit and M receive positions.
CMatrix assemble_channel(std::span<const Position2D> tx_positions,
                         std::span<const Position2D> rx_positions,
                         const ChannelRealization& channel);

/// Circularly symmetric complex Gaussian sample with the given variance.
Complex sample_complex_gaussian(double variance, Rng& rng);

// Diagonal Sigma with Sigma[0,0] ~ CN(0, kappa/(kappa+1)) and the remaining
// L-1 entries ~ CN(0, 1/((kappa+1)(L-1))); all angles i.i.d. uniform [0, pi).
ChannelRealization sample_geometric_channel(std::size_t num_paths, double kappa, Rng& rng);

}  // namespace maopt
