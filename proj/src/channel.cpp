#include "maopt/channel.hpp"

#include <cmath>

namespace maopt {

Eigen::VectorXd PathAngles::alpha() const {
  Eigen::VectorXd a(static_cast<Eigen::Index>(size()));
  for (std::size_t q = 0; q < size(); ++q) {
    a[static_cast<Eigen::Index>(q)] = std::sin(elevation[q]) * std::cos(azimuth[q]);
  }
  return a;
}

Eigen::VectorXd PathAngles::beta() const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(size()));
  for (std::size_t q = 0; q < size(); ++q) {
    b[static_cast<Eigen::Index>(q)] = std::cos(elevation[q]);
  }
  return b;
}

CVector field_response_vector(const Position2D& pos, const PathAngles& angles) {
  if (angles.elevation.size() != angles.azimuth.size()) {
    throw DimensionMismatch("PathAngles: elevation/azimuth length mismatch");
  }
  CVector f(static_cast<Eigen::Index>(angles.size()));
  for (std::size_t q = 0; q < angles.size(); ++q) {
    const double phase =
        kWaveNumber * (std::sin(angles.elevation[q]) * std::cos(angles.azimuth[q]) * pos.x +
                       std::cos(angles.elevation[q]) * pos.y);
    f[static_cast<Eigen::Index>(q)] = std::polar(1.0, phase);
  }
  return f;
}

CVector field_response_vector(const Position2D& pos, const ChannelRealization& channel,
                              Side side) {
  return field_response_vector(pos, channel.angles(side));
}

CMatrix field_response_matrix(std::span<const Position2D> positions, const PathAngles& angles) {
  CMatrix m(static_cast<Eigen::Index>(angles.size()), static_cast<Eigen::Index>(positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    m.col(static_cast<Eigen::Index>(i)) = field_response_vector(positions[i], angles);
  }
  return m;
}

CMatrix assemble_channel(std::span<const Position2D> tx_positions,
                         std::span<const Position2D> rx_positions,
                         const ChannelRealization& channel) {
  if (channel.sigma.rows() != static_cast<Eigen::Index>(channel.rx.size()) ||
      channel.sigma.cols() != static_cast<Eigen::Index>(channel.tx.size())) {
    throw DimensionMismatch("assemble_channel: Sigma does not match the path counts");
  }
  if (tx_positions.empty() || rx_positions.empty()) {
    throw DimensionMismatch("assemble_channel: need at least one antenna per side");
  }
  const CMatrix f = field_response_matrix(rx_positions, channel.rx);
  const CMatrix g = field_response_matrix(tx_positions, channel.tx);
  return f.adjoint() * channel.sigma * g;
}

Complex sample_complex_gaussian(double variance, Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

ChannelRealization sample_geometric_channel(std::size_t num_paths, double kappa, Rng& rng) {
  if (num_paths < 1) throw std::invalid_argument("sample_geometric_channel: need L >= 1");
  if (!(kappa >= 0.0)) throw std::invalid_argument("sample_geometric_channel: need kappa >= 0");

  ChannelRealization ch;
  ch.kappa = kappa;
  const auto l = static_cast<Eigen::Index>(num_paths);
  ch.sigma = CMatrix::Zero(l, l);
  ch.sigma(0, 0) = sample_complex_gaussian(kappa / (kappa + 1.0), rng);
  for (Eigen::Index q = 1; q < l; ++q) {
    ch.sigma(q, q) =
        sample_complex_gaussian(1.0 / ((kappa + 1.0) * static_cast<double>(num_paths - 1)), rng);
  }

  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  auto fill = [&](PathAngles& a) {
    a.elevation.resize(num_paths);
    a.azimuth.resize(num_paths);
    for (std::size_t q = 0; q < num_paths; ++q) {
      a.elevation[q] = angle(rng);
      a.azimuth[q] = angle(rng);
    }
  };
  fill(ch.tx);
  fill(ch.rx);
  return ch;
}

}  // namespace maopt
