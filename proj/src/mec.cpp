#include "maopt/mec.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace maopt {

namespace {

constexpr Complex kJ{0.0, 1.0};

// (H^H H)^{-1} = V S^{-2} V^H from the SVD of H, so accuracy degrades with
// cond(H) rather than cond(H)^2.
CMatrix zf_gram_inverse(const CMatrix& h) {
  if (h.rows() < h.cols()) throw RankDeficient("zf_combiner: fewer antennas than users");
  const Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double hi = sv[0];
  const double lo = sv[sv.size() - 1];
  if (!(lo > 0.0) || (hi / lo) * (hi / lo) > kZfConditionLimit) {
    throw RankDeficient("zf_combiner: H^H H is ill-conditioned");
  }
  const Eigen::VectorXd inv2 = sv.cwiseInverse().cwiseAbs2();
  return svd.matrixV() * inv2.asDiagonal() * svd.matrixV().adjoint();
}

}  // namespace

CMatrix zf_combiner(const CMatrix& h) { return h * zf_gram_inverse(h); }

double user_rate(const CMatrix& h, const CMatrix& w, const std::vector<double>& powers,
                 double sigma2, double bandwidth, std::size_t n) {
  const auto ni = static_cast<Eigen::Index>(n);
  if (ni >= h.cols() || w.cols() != h.cols() || w.rows() != h.rows() ||
      powers.size() != static_cast<std::size_t>(h.cols())) {
    throw DimensionMismatch("user_rate: inconsistent dimensions");
  }
  const CVector wn = w.col(ni);
  double interference = 0.0;
  for (Eigen::Index i = 0; i < h.cols(); ++i) {
    if (i != ni) interference += std::norm(wn.dot(h.col(i))) * powers[static_cast<std::size_t>(i)];
  }
  const double signal = std::norm(wn.dot(h.col(ni))) * powers[n];
  const double noise = wn.squaredNorm() * sigma2;
  return bandwidth * std::log2(1.0 + signal / (interference + noise));
}

double matched_filter_rate(const CMatrix& h, double power, double sigma2, double bandwidth,
                           std::size_t n) {
  const double k = 1.0 + power / sigma2 * h.col(static_cast<Eigen::Index>(n)).squaredNorm();
  return bandwidth * std::log2(k);
}

void MecTasks::validate() const {
  const std::size_t n = data_bits.size();
  if (cycles_per_bit.size() != n || result_bits.size() != n || f_local.size() != n) {
    throw DimensionMismatch("MecTasks: per-user vectors differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(f_local[i] > 0.0)) throw std::invalid_argument("MecTasks: f_local must be positive");
  }
}

double total_latency(const MecTasks& tasks, const std::vector<int>& beta,
                     const std::vector<double>& f_server_alloc, const std::vector<double>& rates) {
  const std::size_t n = tasks.size();
  if (beta.size() != n || f_server_alloc.size() != n || rates.size() != n) {
    throw DimensionMismatch("total_latency: inconsistent vector lengths");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rates[i] > 0.0)) throw DivisionByZero("total_latency: zero rate");
    if (beta[i] != 0) {
      if (!(f_server_alloc[i] > 0.0)) throw DivisionByZero("total_latency: offloader without server cycles");
      total += tasks.data_bits[i] / rates[i] +
               tasks.data_bits[i] * tasks.cycles_per_bit_server / f_server_alloc[i];
    } else {
      total += tasks.data_bits[i] * tasks.cycles_per_bit[i] / tasks.f_local[i] +
               tasks.result_bits[i] / rates[i];
    }
  }
  return total;
}

std::vector<int> offload_decision(const MecTasks& tasks, const std::vector<double>& f_server_alloc,
                                  const std::vector<double>& rates) {
  std::vector<int> beta(tasks.size(), 0);
  for (std::size_t n = 0; n < tasks.size(); ++n) {
    const double d = tasks.data_bits[n];
    const double fs = f_server_alloc[n];
    const double fl = tasks.f_local[n];
    const double lhs = (d - tasks.result_bits[n]) * fs * fl + d * tasks.cycles_per_bit_server * rates[n] * fl;
    const double rhs = d * tasks.cycles_per_bit[n] * rates[n] * fs;
    beta[n] = lhs >= rhs ? 0 : 1;
  }
  return beta;
}

std::vector<double> server_frequency_allocation(const MecTasks& tasks,
                                                const std::vector<int>& beta) {
  std::vector<double> alloc(tasks.size(), 0.0);
  double denom = 0.0;
  for (std::size_t n = 0; n < tasks.size(); ++n) {
    if (beta[n] != 0) denom += std::sqrt(tasks.f_local[n]);
  }
  if (denom == 0.0) return alloc;
  for (std::size_t n = 0; n < tasks.size(); ++n) {
    if (beta[n] != 0) alloc[n] = tasks.f_server * std::sqrt(tasks.f_local[n]) / denom;
  }
  return alloc;
}

MecProblem::MecProblem(ChannelRealization channel, std::vector<Position2D> user_positions,
                       const Panel& rx_panel, std::size_t n_rx, MecTasks tasks,
                       std::vector<double> powers, double sigma2, double bandwidth,
                       SeparationConstraint d)
    : CasePlugin(d),
      channel_(std::move(channel)),
      users_(std::move(user_positions)),
      tasks_(std::move(tasks)),
      powers_(std::move(powers)),
      sigma2_(sigma2),
      bandwidth_(bandwidth) {
  tasks_.validate();
  if (users_.size() != tasks_.size() || powers_.size() != tasks_.size()) {
    throw DimensionMismatch("MecProblem: users, tasks and powers differ in length");
  }
  if (users_.empty() || n_rx < users_.size()) {
    throw std::invalid_argument("MecProblem: need 1 <= N <= M for zero forcing");
  }
  groups_.push_back({"rx", rx_panel, std::vector<Position2D>(n_rx), {}});
  reset_other_vars();
}

void MecProblem::reset_other_vars() {
  beta_.assign(users_.size(), 1);
  f_server_alloc_.assign(users_.size(), tasks_.f_server / static_cast<double>(users_.size()));
}

CMatrix MecProblem::channel_matrix() const {
  return assemble_channel(users_, groups_[0].r, channel_);
}

std::vector<double> MecProblem::rates() const {
  const CMatrix phi = zf_gram_inverse(channel_matrix());
  std::vector<double> r(users_.size());
  for (std::size_t n = 0; n < r.size(); ++n) {
    const auto ni = static_cast<Eigen::Index>(n);
    r[n] = bandwidth_ * std::log2(1.0 + powers_[n] / (sigma2_ * phi(ni, ni).real()));
  }
  return r;
}

void MecProblem::update_other_vars() {
  std::vector<double> r;
  try {
    r = rates();
  } catch (const RankDeficient&) {
    return;
  }
  beta_ = offload_decision(tasks_, f_server_alloc_, r);
  f_server_alloc_ = server_frequency_allocation(tasks_, beta_);
}

double MecProblem::objective() const {
  try {
    return total_latency(tasks_, beta_, f_server_alloc_, rates());
  } catch (const RankDeficient&) {
    return std::numeric_limits<double>::infinity();
  } catch (const DivisionByZero&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<Vec2> MecProblem::position_gradient(std::size_t group) const {
  if (group != 0) throw std::out_of_range("MecProblem: unknown group");
  const CMatrix f = field_response_matrix(groups_[0].r, channel_.rx);
  const CMatrix sg = channel_.sigma * field_response_matrix(users_, channel_.tx);  // L x N
  const CMatrix h = f.adjoint() * sg;
  const CMatrix phi = zf_gram_inverse(h);
  const CMatrix w = h * phi;
  const auto n_users = static_cast<Eigen::Index>(users_.size());

  // dT/de_n with e_n = [(H^H H)^{-1}]_nn and R_n = b log2(1 + a_n / e_n)
  Eigen::VectorXd dt_de(n_users);
  for (Eigen::Index n = 0; n < n_users; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double e = phi(n, n).real();
    const double a = powers_[i] / sigma2_;
    const double rate = bandwidth_ * std::log2(1.0 + a / e);
    const double c = beta_[i] != 0 ? tasks_.data_bits[i] : tasks_.result_bits[i];
    dt_de[n] = c / (rate * rate) * (bandwidth_ / std::numbers::ln2) * a / (e * (e + a));
  }

  const Eigen::VectorXd alpha = channel_.rx.alpha();
  const Eigen::VectorXd beta = channel_.rx.beta();
  std::vector<Vec2> grad;
  for (Eigen::Index m = 0; m < f.cols(); ++m) {
    // derivative of row m of H along x and y
    Eigen::RowVectorXcd dx = Eigen::RowVectorXcd::Zero(n_users);
    Eigen::RowVectorXcd dy = Eigen::RowVectorXcd::Zero(n_users);
    for (Eigen::Index q = 0; q < f.rows(); ++q) {
      const Complex c = -kJ * kWaveNumber * std::conj(f(q, m));
      dx += c * alpha[q] * sg.row(q);
      dy += c * beta[q] * sg.row(q);
    }
    const Eigen::RowVectorXcd px = dx * phi;
    const Eigen::RowVectorXcd py = dy * phi;
    double gx = 0.0;
    double gy = 0.0;
    for (Eigen::Index n = 0; n < n_users; ++n) {
      gx += dt_de[n] * -2.0 * (std::conj(w(m, n)) * px[n]).real();
      gy += dt_de[n] * -2.0 * (std::conj(w(m, n)) * py[n]).real();
    }
    grad.push_back({gx, gy});
  }
  return grad;
}

MecScenario sample_mec_scenario(const CaseSettings& s, Rng& rng) {
  MecScenario sc;
  sc.channel = sample_geometric_channel(s.num_paths, s.kappa, rng);
  std::uniform_real_distribution<double> floc(s.f_local_min_hz, s.f_local_max_hz);
  sc.tasks.cycles_per_bit_server = s.cycles_per_bit_server;
  sc.tasks.f_server = s.f_server_hz;
  for (std::size_t n = 0; n < s.n_tx; ++n) {
    sc.users.push_back({static_cast<double>(n) * s.user_spacing, 0.0});
    const double fl = floc(rng);
    const double bits = s.bits_per_local_hz * fl;
    sc.tasks.f_local.push_back(fl);
    sc.tasks.data_bits.push_back(bits);
    sc.tasks.result_bits.push_back(s.result_ratio * bits);
    sc.tasks.cycles_per_bit.push_back(s.cycles_per_bit_local);
  }
  return sc;
}

MecProblem make_mec_problem(const MecScenario& scenario, const CaseSettings& s) {
  return MecProblem(scenario.channel, scenario.users, s.square_panel(), s.n_rx, scenario.tasks,
                    std::vector<double>(s.n_tx, s.power()), s.sigma2, s.bandwidth_hz,
                    s.separation());
}

CaseOutcome solve_mec(MecProblem& problem, const CaseSettings& s, Rng& rng) {
  PenaltyOptions opts;
  opts.pgd = s.pgd;
  auto result = run_penalty_ao(problem, s.schedule, s.stop, rng, opts);
  auto out = outcome_from(problem);
  out.penalty = std::move(result);
  return out;
}

CaseOutcome run_mec_case(const CaseSettings& s, Rng& rng) {
  auto problem = make_mec_problem(sample_mec_scenario(s, rng), s);
  return solve_mec(problem, s, rng);
}

}  // namespace maopt
