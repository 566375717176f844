#include "maopt/rzf.hpp"

#include <cmath>

namespace maopt {

namespace {

constexpr Complex kJ{0.0, 1.0};

}  // namespace

double rzf_objective(const CMatrix& h, const CMatrix& w, double alpha) {
  if (h.cols() != w.rows() || w.cols() != h.rows()) {
    throw DimensionMismatch("rzf_objective: W must be N x M for an M x N channel");
  }
  const CMatrix e = CMatrix::Identity(h.rows(), h.rows()) - h * w;
  return e.squaredNorm() + alpha * w.squaredNorm();
}

CMatrix rzf_closed_form(const CMatrix& h, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("rzf_closed_form: alpha must be positive");
  const CMatrix gram = h * h.adjoint() + alpha * CMatrix::Identity(h.rows(), h.rows());
  // W^H = gram^{-1} H since gram is Hermitian
  return gram.llt().solve(h).adjoint();
}

double sum_rate(const CMatrix& h, const CMatrix& w, double p_max, double sigma2) {
  const double norm = w.norm();
  if (norm == 0.0) throw ZeroPrecoder("sum_rate: precoder is zero");
  const CMatrix hw = h * w * (std::sqrt(p_max) / norm);
  double total = 0.0;
  for (Eigen::Index m = 0; m < hw.rows(); ++m) {
    const double signal = std::norm(hw(m, m));
    const double interference = hw.row(m).squaredNorm() - signal;
    total += std::log2(1.0 + signal / (interference + sigma2));
  }
  return total;
}

RzfProblem::RzfProblem(std::vector<ChannelRealization> user_channels,
                       std::vector<Position2D> user_positions, const Panel& tx_panel,
                       std::size_t n_tx, double alpha, double p_max, double sigma2,
                       SeparationConstraint d)
    : CasePlugin(d), channels_(std::move(user_channels)), alpha_(alpha), p_max_(p_max), sigma2_(sigma2) {
  if (channels_.size() != user_positions.size() || channels_.empty()) {
    throw DimensionMismatch("RzfProblem: one channel per user required");
  }
  if (n_tx == 0) throw std::invalid_argument("RzfProblem: need N >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("RzfProblem: alpha must be positive");
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    const CVector f = field_response_vector(user_positions[m], channels_[m].rx);
    user_rows_.push_back(f.adjoint() * channels_[m].sigma);
  }
  groups_.push_back({"tx", tx_panel, std::vector<Position2D>(n_tx), {}});
  w_ = CMatrix::Zero(static_cast<Eigen::Index>(n_tx), static_cast<Eigen::Index>(channels_.size()));
}

CMatrix RzfProblem::channel_matrix() const {
  const auto& t = groups_[0].r;
  CMatrix h(static_cast<Eigen::Index>(channels_.size()), static_cast<Eigen::Index>(t.size()));
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    h.row(static_cast<Eigen::Index>(m)) =
        user_rows_[m] * field_response_matrix(t, channels_[m].tx);
  }
  return h;
}

void RzfProblem::update_other_vars() { w_ = rzf_closed_form(channel_matrix(), alpha_); }

double RzfProblem::objective() const { return rzf_objective(channel_matrix(), w_, alpha_); }

double RzfProblem::metric() const { return sum_rate(channel_matrix(), w_, p_max_, sigma2_); }

std::vector<Vec2> RzfProblem::position_gradient(std::size_t group) const {
  if (group != 0) throw std::out_of_range("RzfProblem: unknown group");
  const auto& t = groups_[0].r;
  std::vector<CMatrix> g;
  for (const auto& ch : channels_) g.push_back(field_response_matrix(t, ch.tx));
  CMatrix h(static_cast<Eigen::Index>(channels_.size()), static_cast<Eigen::Index>(t.size()));
  for (std::size_t m = 0; m < channels_.size(); ++m) {
    h.row(static_cast<Eigen::Index>(m)) = user_rows_[m] * g[m];
  }
  const CMatrix e = CMatrix::Identity(h.rows(), h.rows()) - h * w_;
  const CMatrix we = w_ * e.adjoint();  // N x M; df = -2 Re tr(W E^H dH)

  std::vector<Vec2> grad;
  for (std::size_t n = 0; n < t.size(); ++n) {
    const auto ni = static_cast<Eigen::Index>(n);
    Complex sx = 0.0;
    Complex sy = 0.0;
    for (std::size_t m = 0; m < channels_.size(); ++m) {
      const auto mi = static_cast<Eigen::Index>(m);
      const Eigen::VectorXd a = channels_[m].tx.alpha();
      const Eigen::VectorXd b = channels_[m].tx.beta();
      for (Eigen::Index p = 0; p < g[m].rows(); ++p) {
        const Complex c = we(ni, mi) * user_rows_[m][p] * kJ * kWaveNumber * g[m](p, ni);
        sx += c * a[p];
        sy += c * b[p];
      }
    }
    grad.push_back({-2.0 * sx.real(), -2.0 * sy.real()});
  }
  return grad;
}

RzfScenario sample_rzf_scenario(const CaseSettings& s, Rng& rng) {
  RzfScenario sc;
  for (std::size_t m = 0; m < s.n_rx; ++m) {
    sc.channels.push_back(sample_geometric_channel(s.num_paths, s.kappa, rng));
    sc.users.push_back({static_cast<double>(m) * s.user_spacing, 0.0});
  }
  return sc;
}

double rzf_alpha(const CaseSettings& s) {
  return s.rzf_alpha > 0.0 ? s.rzf_alpha : static_cast<double>(s.n_rx) * s.sigma2 / s.power();
}

RzfProblem make_rzf_problem(const RzfScenario& scenario, const CaseSettings& s) {
  return RzfProblem(scenario.channels, scenario.users, s.square_panel(), s.n_tx, rzf_alpha(s),
                    s.power(), s.sigma2, s.separation());
}

CaseOutcome solve_rzf(RzfProblem& problem, const CaseSettings& s, Rng& rng) {
  PenaltyOptions opts;
  opts.pgd = s.pgd;
  auto result = run_penalty_ao(problem, s.schedule, s.stop, rng, opts);
  auto out = outcome_from(problem);
  out.penalty = std::move(result);
  return out;
}

CaseOutcome run_rzf_case(const CaseSettings& s, Rng& rng) {
  auto problem = make_rzf_problem(sample_rzf_scenario(s, rng), s);
  return solve_rzf(problem, s, rng);
}

}  // namespace maopt
