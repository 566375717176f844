#include <doctest.h>

#include <numeric>

#include "maopt/capacity.hpp"

using namespace maopt;

namespace {

CMatrix random_matrix(int rows, int cols, Rng& rng) {
  CMatrix h(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) h(i, j) = sample_complex_gaussian(1.0, rng);
  }
  return h;
}

double log2det_via_eigen(const CMatrix& h, const CMatrix& q, double sigma2) {
  const CMatrix k = CMatrix::Identity(h.rows(), h.rows()) + h * q * h.adjoint() / sigma2;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(k);
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) s += std::log2(es.eigenvalues()(i));
  return s;
}

CapacityProblem random_problem(std::uint64_t seed, CaseSettings s = {}) {
  Rng rng(seed);
  auto p = make_capacity_problem(sample_capacity_scenario(s, rng), s);
  initialize_positions(p, rng);
  p.update_other_vars();
  return p;
}

std::vector<Vec2> fd_gradient(CapacityProblem& p, std::size_t group) {
  const auto saved = p.groups()[group].r;
  const ValueFn f = [&](std::span<const Position2D> x) {
    p.groups()[group].r.assign(x.begin(), x.end());
    return p.objective();
  };
  auto g = finite_difference_gradient(f, saved);
  p.groups()[group].r = saved;
  return g;
}

}  // namespace

TEST_CASE("capacity objective matches an eigenvalue log-det") {
  Rng rng(2);
  const CMatrix h = random_matrix(4, 3, rng);
  const CMatrix a = random_matrix(3, 3, rng);
  const CMatrix q = a * a.adjoint();
  CHECK(capacity_objective(h, q, 0.7) == doctest::Approx(-log2det_via_eigen(h, q, 0.7)).epsilon(1e-12));
  CHECK(capacity_objective(h, CMatrix::Zero(3, 3), 1.0) == doctest::Approx(0.0));
}

TEST_CASE("water-filling powers on a hand example") {
  // floors sigma2 / lambda^2 = {0.25, 1}; P = 1 -> level 1.125, both active
  auto w = water_filling_powers({2.0, 1.0}, 1.0, 1.0);
  CHECK(w.active == 2);
  CHECK(w.level == doctest::Approx(1.125));
  CHECK(w.gamma[0] == doctest::Approx(0.875));
  CHECK(w.gamma[1] == doctest::Approx(0.125));
  // P = 0.5: level 0.75 stays below the weak floor
  w = water_filling_powers({2.0, 1.0}, 0.5, 1.0);
  CHECK(w.active == 1);
  CHECK(w.level == doctest::Approx(0.75));
  CHECK(w.gamma[0] == doctest::Approx(0.5));
  CHECK(w.gamma[1] == 0.0);
  CHECK_THROWS_AS(water_filling_powers({}, 1.0, 1.0), ZeroChannel);
}

TEST_CASE("water-filling KKT on random channels") {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const CMatrix h = random_matrix(4, 5, rng);
    const double p = 0.1 + 10.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto wf = water_filling_full(h, p, 1.0);
    CHECK(wf.q.trace().real() == doctest::Approx(p).epsilon(1e-12));
    double sum = 0.0;
    for (std::size_t s = 0; s < wf.singular_values.size(); ++s) {
      const double g = wf.powers.gamma[s];
      const double floor = 1.0 / (wf.singular_values[s] * wf.singular_values[s]);
      sum += g;
      if (g > 0.0) CHECK(g + floor == doctest::Approx(wf.powers.level).epsilon(1e-9));
      else CHECK(floor >= wf.powers.level - 1e-9);
    }
    CHECK(sum == doctest::Approx(p).epsilon(1e-12));
    // a random equal-trace covariance never does better
    const CMatrix a = random_matrix(5, 5, rng);
    CMatrix q = a * a.adjoint();
    q *= p / q.trace().real();
    CHECK(capacity_objective(h, wf.q, 1.0) <= capacity_objective(h, q, 1.0) + 1e-12);
  }
}

TEST_CASE("water filling of a zero channel") {
  CHECK_THROWS_AS(water_filling(CMatrix::Zero(2, 2), 1.0, 1.0), ZeroChannel);
}

TEST_CASE("position gradients agree with finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto p = random_problem(seed);
    for (const std::size_t g : {CapacityProblem::kRx, CapacityProblem::kTx}) {
      const auto an = p.position_gradient(g);
      const auto fd = fd_gradient(p, g);
      double scale = 0.0;
      for (const auto& v : an) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
      for (std::size_t i = 0; i < an.size(); ++i) {
        CHECK(std::abs(an[i].x - fd[i].x) <= 1e-5 * std::max(1.0, scale));
        CHECK(std::abs(an[i].y - fd[i].y) <= 1e-5 * std::max(1.0, scale));
      }
    }
  }
}

TEST_CASE("leave-one-out receive gradient equals the direct one") {
  auto p = random_problem(23);
  const auto g = p.position_gradient(CapacityProblem::kRx);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const Vec2 l = p.rx_gradient_leave_one_out(m);
    CHECK(l.x == doctest::Approx(g[m].x).epsilon(1e-9));
    CHECK(l.y == doctest::Approx(g[m].y).epsilon(1e-9));
  }
}

TEST_CASE("capacity metric is the negated objective") {
  auto p = random_problem(4);
  CHECK(p.metric() == doctest::Approx(-p.objective()));
  CHECK(p.metric() > 0.0);
  p.reset_other_vars();
  CHECK(p.objective() == doctest::Approx(0.0));
  CHECK(p.channel_matrix().rows() == 6);
}

TEST_CASE("single-antenna capacity solve is feasible") {
  CaseSettings s;
  s.n_tx = 1;
  s.n_rx = 1;
  s.panel = 2.0;
  Rng rng(8);
  const auto out = run_capacity_case(s, rng);
  CHECK(std::isinf(out.min_dist));
  CHECK(out.metric > 0.0);
}

TEST_CASE("capacity solve keeps antennas separated") {
  CaseSettings s;
  s.panel = 2.0;
  s.n_tx = 4;
  s.n_rx = 4;
  Rng rng(12);
  const auto out = run_capacity_case(s, rng);
  CHECK(out.min_dist >= 0.5 - 1e-6);
  CHECK(out.penalty.iterations >= 1);
  for (const auto& grp : out.positions) {
    for (const auto& pos : grp) CHECK(s.square_panel().contains(pos, 1e-12));
  }
}
