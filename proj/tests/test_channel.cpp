#include <doctest.h>

#include "maopt/channel.hpp"

using namespace maopt;

namespace {

PathAngles angles(std::vector<double> el, std::vector<double> az) {
  PathAngles a;
  a.elevation = std::move(el);
  a.azimuth = std::move(az);
  return a;
}

}  // namespace

TEST_CASE("field response at the origin is all ones") {
  const auto a = angles({0.3, 1.1, 2.0}, {0.5, 2.5, 1.0});
  const CVector f = field_response_vector({0.0, 0.0}, a);
  CHECK((f - CVector::Ones(3)).norm() < 1e-15);
}

TEST_CASE("field response phases") {
  const auto a = angles({0.7}, {0.4});
  const Position2D p{0.25, -0.6};
  const double phase = kWaveNumber * (std::sin(0.7) * std::cos(0.4) * p.x + std::cos(0.7) * p.y);
  const CVector f = field_response_vector(p, a);
  CHECK(std::abs(f(0) - std::polar(1.0, phase)) < 1e-14);
}

TEST_CASE("assembled channel matches the triple sum") {
  Rng rng(3);
  const auto ch = sample_geometric_channel(4, 1.0, rng);
  const std::vector<Position2D> tx{{0.1, 0.2}, {-0.4, 0.7}};
  const std::vector<Position2D> rx{{0.0, 0.0}, {1.0, -0.5}, {0.3, 0.3}};
  const CMatrix h = assemble_channel(tx, rx, ch);
  REQUIRE(h.rows() == 3);
  REQUIRE(h.cols() == 2);
  for (int m = 0; m < 3; ++m) {
    for (int n = 0; n < 2; ++n) {
      const CVector f = field_response_vector(rx[m], ch.rx);
      const CVector g = field_response_vector(tx[n], ch.tx);
      Complex acc = 0.0;
      for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 4; ++q) acc += std::conj(f(p)) * ch.sigma(p, q) * g(q);
      }
      CHECK(std::abs(h(m, n) - acc) < 1e-12);
    }
  }
}

TEST_CASE("geometric channel shape and angle ranges") {
  Rng rng(5);
  const auto ch = sample_geometric_channel(10, 1.0, rng);
  CHECK(ch.num_paths() == 10);
  CHECK(ch.sigma.rows() == 10);
  CHECK(ch.sigma.cols() == 10);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      if (i != j) CHECK(ch.sigma(i, j) == Complex(0.0, 0.0));
    }
    CHECK(ch.tx.elevation[i] >= 0.0);
    CHECK(ch.tx.elevation[i] < std::numbers::pi);
    CHECK(ch.rx.azimuth[i] >= 0.0);
    CHECK(ch.rx.azimuth[i] < std::numbers::pi);
  }
}

TEST_CASE("path gain variances follow the Rician split") {
  Rng rng(9);
  const int draws = 20000;
  double los = 0.0, nlos = 0.0;
  for (int t = 0; t < draws; ++t) {
    const auto ch = sample_geometric_channel(5, 1.0, rng);
    los += std::norm(ch.sigma(0, 0));
    nlos += std::norm(ch.sigma(3, 3));
  }
  CHECK(los / draws == doctest::Approx(0.5).epsilon(0.05));
  CHECK(nlos / draws == doctest::Approx(0.125).epsilon(0.05));
}

TEST_CASE("complex gaussian variance") {
  Rng rng(1);
  double acc = 0.0;
  for (int i = 0; i < 20000; ++i) acc += std::norm(sample_complex_gaussian(2.0, rng));
  CHECK(acc / 20000 == doctest::Approx(2.0).epsilon(0.05));
}
