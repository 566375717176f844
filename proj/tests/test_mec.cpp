#include <doctest.h>

#include "maopt/mec.hpp"

using namespace maopt;

namespace {

CMatrix random_matrix(int rows, int cols, Rng& rng) {
  CMatrix h(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) h(i, j) = sample_complex_gaussian(1.0, rng);
  }
  return h;
}

MecTasks two_tasks() {
  MecTasks t;
  t.data_bits = {5e6, 2e6};
  t.cycles_per_bit = {1000.0, 1000.0};
  t.result_bits = {1e6, 0.4e6};
  t.f_local = {1e9, 0.6e9};
  return t;
}

MecProblem random_problem(std::uint64_t seed) {
  CaseSettings s;
  Rng rng(seed);
  auto p = make_mec_problem(sample_mec_scenario(s, rng), s);
  initialize_positions(p, rng);
  p.update_other_vars();
  return p;
}

}  // namespace

TEST_CASE("zero forcing inverts the channel") {
  Rng rng(1);
  const CMatrix h = random_matrix(6, 4, rng);
  const CMatrix w = zf_combiner(h);
  CHECK((w.adjoint() * h - CMatrix::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("zero forcing rejects rank-deficient channels") {
  Rng rng(2);
  CMatrix h = random_matrix(4, 3, rng);
  h.col(2) = h.col(0);
  CHECK_THROWS_AS(zf_combiner(h), RankDeficient);
  CHECK_THROWS_AS(zf_combiner(random_matrix(2, 3, rng)), RankDeficient);
}

TEST_CASE("zf rate and matched-filter rate agree for one user") {
  Rng rng(3);
  const CMatrix h = random_matrix(5, 1, rng);
  const double r = user_rate(h, zf_combiner(h), {2.0}, 0.5, 1e6, 0);
  CHECK(r == doctest::Approx(matched_filter_rate(h, 2.0, 0.5, 1e6, 0)).epsilon(1e-12));
}

TEST_CASE("zf removes interference") {
  Rng rng(4);
  const CMatrix h = random_matrix(6, 3, rng);
  const CMatrix w = zf_combiner(h);
  const std::vector<double> p{1.0, 2.0, 3.0};
  for (std::size_t n = 0; n < 3; ++n) {
    const double snr = p[n] / (w.col(static_cast<int>(n)).squaredNorm() * 1.0);
    CHECK(user_rate(h, w, p, 1.0, 1.0, n) == doctest::Approx(std::log2(1.0 + snr)).epsilon(1e-12));
  }
}

TEST_CASE("offload decision picks the faster option") {
  const MecTasks t = two_tasks();
  Rng rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> fs{1e9 + 2e10 * u(rng), 1e9 + 2e10 * u(rng)};
    const std::vector<double> rate{1e6 + 1e9 * u(rng), 1e6 + 1e9 * u(rng)};
    const auto beta = offload_decision(t, fs, rate);
    for (std::size_t n = 0; n < 2; ++n) {
      const double local = t.data_bits[n] * t.cycles_per_bit[n] / t.f_local[n] + t.result_bits[n] / rate[n];
      const double off = t.data_bits[n] / rate[n] + t.data_bits[n] * t.cycles_per_bit_server / fs[n];
      CHECK(beta[n] == (off < local ? 1 : 0));
    }
  }
}

TEST_CASE("server split is optimal when data scales with local speed") {
  MecTasks t;
  t.f_local = {0.5e9, 1.0e9, 1.4e9};
  for (double f : t.f_local) t.data_bits.push_back(5e-3 * f);
  t.cycles_per_bit = {1000, 1000, 1000};
  t.result_bits = {0, 0, 0};
  const std::vector<int> beta{1, 1, 1};
  const auto alloc = server_frequency_allocation(t, beta);
  CHECK(alloc[0] + alloc[1] + alloc[2] == doctest::Approx(t.f_server));
  auto cost = [&](const std::vector<double>& f) {
    double c = 0.0;
    for (std::size_t n = 0; n < 3; ++n) c += t.data_bits[n] * t.cycles_per_bit_server / f[n];
    return c;
  };
  Rng rng(6);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> f = alloc;
    const double a = u(rng) * alloc[0], b = u(rng) * alloc[1];
    f[0] += a;
    f[1] += b;
    f[2] -= a + b;
    CHECK(cost(alloc) <= cost(f) * (1 + 1e-12));
  }
  CHECK(server_frequency_allocation(t, {0, 0, 0}) == std::vector<double>{0, 0, 0});
  CHECK(server_frequency_allocation(t, {0, 1, 0})[1] == doctest::Approx(t.f_server));
}

TEST_CASE("total latency by hand") {
  const MecTasks t = two_tasks();
  const double l = total_latency(t, {1, 0}, {10e9, 0.0}, {1e8, 2e8});
  const double expect = 5e6 / 1e8 + 5e6 * 200.0 / 10e9 + 2e6 * 1000.0 / 0.6e9 + 0.4e6 / 2e8;
  CHECK(l == doctest::Approx(expect).epsilon(1e-14));
  CHECK_THROWS_AS(total_latency(t, {1, 0}, {0.0, 0.0}, {1e8, 2e8}), DivisionByZero);
}

TEST_CASE("latency gradient agrees with finite differences") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto p = random_problem(seed);
    if (!std::isfinite(p.objective())) continue;
    const auto an = p.position_gradient(0);
    const auto saved = p.groups()[0].r;
    const ValueFn f = [&](std::span<const Position2D> x) {
      p.groups()[0].r.assign(x.begin(), x.end());
      return p.objective();
    };
    const auto fd = finite_difference_gradient(f, saved);
    p.groups()[0].r = saved;
    double scale = 0.0;
    for (const auto& v : an) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
    for (std::size_t i = 0; i < an.size(); ++i) {
      CHECK(std::abs(an[i].x - fd[i].x) <= 1e-4 * scale);
      CHECK(std::abs(an[i].y - fd[i].y) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("other-variable update never raises the latency") {
  auto p = random_problem(9);
  p.reset_other_vars();
  const double before = p.objective();
  p.optimize_other_vars();
  CHECK(p.objective() <= before * (1 + 1e-12));
}

TEST_CASE("mec problem validates its sizes") {
  Rng rng(1);
  const auto ch = sample_geometric_channel(4, 1.0, rng);
  MecTasks t = two_tasks();
  CHECK_THROWS(MecProblem(ch, {{0, 0}, {1, 0}}, Panel::centered_square(2.0), 1, t, {1.0, 1.0}, 1.0,
                          1e6, SeparationConstraint(0.5)));
  t.f_local[0] = 0.0;
  CHECK_THROWS(t.validate());
}
