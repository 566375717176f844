#include "maopt/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace maopt {

namespace {

constexpr Complex kJ{0.0, 1.0};

CMatrix identity(Eigen::Index n) { return CMatrix::Identity(n, n); }

}  // namespace

double capacity_objective(const CMatrix& h, const CMatrix& q, double sigma2) {
  const CMatrix k = identity(h.rows()) + h * q * h.adjoint() / sigma2;
  const Eigen::LLT<CMatrix> llt(k);
  if (llt.info() != Eigen::Success) {
    // Only reachable with a non-PSD Q; fall back to eigenvalues.
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(k);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < k.rows(); ++i) logdet += std::log(es.eigenvalues()[i]);
    return -logdet / std::numbers::ln2;
  }
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < k.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
  return -logdet / std::numbers::ln2;
}

WaterFillingPowers water_filling_powers(const std::vector<double>& singular_values, double p_max,
                                        double sigma2) {
  if (singular_values.empty()) throw ZeroChannel("water_filling: no nonzero singular value");
  if (!(p_max >= 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("water_filling: need p_max >= 0 and sigma2 > 0");
  }
  const std::size_t s = singular_values.size();
  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return singular_values[a] > singular_values[b]; });

  std::vector<double> floor_level(s);  // sigma2 / lambda^2, ascending along `order`
  for (std::size_t i = 0; i < s; ++i) {
    const double lam = singular_values[order[i]];
    if (!(lam > 0.0)) throw ZeroChannel("water_filling: singular values must be positive");
    floor_level[i] = sigma2 / (lam * lam);
  }

  // Largest active set whose common level sits above every active floor.
  WaterFillingPowers out;
  double sum = 0.0;
  for (std::size_t k = 1; k <= s; ++k) {
    sum += floor_level[k - 1];
    const double level = (p_max + sum) / static_cast<double>(k);
    if (level > floor_level[k - 1]) {
      out.level = level;
      out.active = k;
    } else {
      break;
    }
  }
  out.gamma.assign(s, 0.0);
  for (std::size_t i = 0; i < out.active; ++i) out.gamma[order[i]] = out.level - floor_level[i];
  return out;
}

WaterFillingResult water_filling_full(const CMatrix& h, double p_max, double sigma2) {
  if (h.size() == 0 || h.norm() == 0.0) throw ZeroChannel("water_filling: channel is zero");
  const Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = sv[0] * 1e-12 * static_cast<double>(std::max(h.rows(), h.cols()));

  WaterFillingResult out;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > tol) out.singular_values.push_back(sv[i]);
  }
  out.powers = water_filling_powers(out.singular_values, p_max, sigma2);

  const auto rank = static_cast<Eigen::Index>(out.singular_values.size());
  const CMatrix v = svd.matrixV().leftCols(rank);
  Eigen::VectorXd gamma(rank);
  for (Eigen::Index i = 0; i < rank; ++i) gamma[i] = out.powers.gamma[static_cast<std::size_t>(i)];
  out.q = v * gamma.asDiagonal() * v.adjoint();
  out.q = 0.5 * (out.q + out.q.adjoint()).eval();
  return out;
}

CMatrix water_filling(const CMatrix& h, double p_max, double sigma2) {
  return water_filling_full(h, p_max, sigma2).q;
}

CapacityProblem::CapacityProblem(ChannelRealization channel, const Panel& tx_panel,
                                 const Panel& rx_panel, std::size_t n_tx, std::size_t n_rx,
                                 double p_max, double sigma2, SeparationConstraint d)
    : CasePlugin(d), channel_(std::move(channel)), p_max_(p_max), sigma2_(sigma2) {
  if (n_tx == 0 || n_rx == 0) throw std::invalid_argument("CapacityProblem: need N, M >= 1");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("CapacityProblem: sigma2 must be positive");
  groups_.push_back({"rx", rx_panel, std::vector<Position2D>(n_rx), {}});
  groups_.push_back({"tx", tx_panel, std::vector<Position2D>(n_tx), {}});
  q_ = CMatrix::Zero(static_cast<Eigen::Index>(n_tx), static_cast<Eigen::Index>(n_tx));
}

CMatrix CapacityProblem::channel_matrix() const {
  return assemble_channel(groups_[kTx].r, groups_[kRx].r, channel_);
}

void CapacityProblem::update_other_vars() {
  try {
    q_ = water_filling(channel_matrix(), p_max_, sigma2_);
  } catch (const ZeroChannel&) {
    q_.setZero();
  }
}

double CapacityProblem::objective() const {
  return capacity_objective(channel_matrix(), q_, sigma2_);
}

std::vector<Vec2> CapacityProblem::position_gradient(std::size_t group) const {
  const CMatrix f = field_response_matrix(groups_[kRx].r, channel_.rx);
  const CMatrix g = field_response_matrix(groups_[kTx].r, channel_.tx);
  const CMatrix h = f.adjoint() * channel_.sigma * g;
  const CMatrix k = identity(h.rows()) + h * q_ * h.adjoint() / sigma2_;
  // X = Q H^H K^{-1}; df = -(2 / (sigma2 ln2)) Re tr(X dH)
  const CMatrix x = k.llt().solve(h * q_.adjoint()).adjoint();
  const double scale = -2.0 / (sigma2_ * std::numbers::ln2);

  std::vector<Vec2> grad;
  if (group == kTx) {
    const Eigen::VectorXd a = channel_.tx.alpha();
    const Eigen::VectorXd b = channel_.tx.beta();
    const CMatrix t = x * f.adjoint() * channel_.sigma;  // N x L
    for (Eigen::Index n = 0; n < g.cols(); ++n) {
      Complex sx = 0.0;
      Complex sy = 0.0;
      for (Eigen::Index p = 0; p < g.rows(); ++p) {
        const Complex c = t(n, p) * kJ * kWaveNumber * g(p, n);
        sx += c * a[p];
        sy += c * b[p];
      }
      grad.push_back({scale * sx.real(), scale * sy.real()});
    }
  } else if (group == kRx) {
    const Eigen::VectorXd a = channel_.rx.alpha();
    const Eigen::VectorXd b = channel_.rx.beta();
    const CMatrix r = channel_.sigma * g * x;  // L x M
    for (Eigen::Index m = 0; m < f.cols(); ++m) {
      Complex sx = 0.0;
      Complex sy = 0.0;
      for (Eigen::Index q = 0; q < f.rows(); ++q) {
        const Complex c = -kJ * kWaveNumber * std::conj(f(q, m)) * r(q, m);
        sx += c * a[q];
        sy += c * b[q];
      }
      grad.push_back({scale * sx.real(), scale * sy.real()});
    }
  } else {
    throw std::out_of_range("CapacityProblem: unknown group");
  }
  return grad;
}

Vec2 CapacityProblem::rx_gradient_leave_one_out(std::size_t m) const {
  const CMatrix f = field_response_matrix(groups_[kRx].r, channel_.rx);
  const CMatrix g = field_response_matrix(groups_[kTx].r, channel_.tx);
  const auto mi = static_cast<Eigen::Index>(m);
  if (mi >= f.cols()) throw std::out_of_range("rx_gradient_leave_one_out: bad antenna index");

  const Eigen::SelfAdjointEigenSolver<CMatrix> es(q_);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CMatrix s = es.eigenvectors() * root.asDiagonal();  // U_Q V_Q^{1/2}
  const CMatrix z = channel_.sigma * g * s;                 // L x N
  const CMatrix y = f.adjoint() * z;                        // M x N

  CMatrix w(y.rows() - 1, y.cols());  // y without row m
  for (Eigen::Index i = 0, k = 0; i < y.rows(); ++i) {
    if (i != mi) w.row(k++) = y.row(i);
  }
  const CMatrix a_mat = identity(y.cols()) + w.adjoint() * w / sigma2_;
  const CMatrix bm = z * a_mat.llt().solve(z.adjoint());  // B_{\m}

  const CVector fm = f.col(mi);
  const CVector bf = bm * fm;
  // det(I + W^H W / s2) / det(I + H Q H^H / s2) by the determinant lemma
  const double ratio = 1.0 / (1.0 + (fm.adjoint() * bf)(0, 0).real() / sigma2_);
  const double scale = 2.0 * kWaveNumber / sigma2_ * ratio / std::numbers::ln2;

  const Eigen::VectorXd alpha = channel_.rx.alpha();
  const Eigen::VectorXd beta = channel_.rx.beta();
  Complex sx = 0.0;
  Complex sy = 0.0;
  for (Eigen::Index q = 0; q < fm.size(); ++q) {
    const Complex v = kJ * bf[q] * std::conj(fm[q]);
    sx += alpha[q] * v;
    sy += beta[q] * v;
  }
  return {scale * sx.real(), scale * sy.real()};
}

CapacityScenario sample_capacity_scenario(const CaseSettings& s, Rng& rng) {
  return {sample_geometric_channel(s.num_paths, s.kappa, rng)};
}

CapacityProblem make_capacity_problem(const CapacityScenario& scenario, const CaseSettings& s) {
  return CapacityProblem(scenario.channel, s.square_panel(), s.square_panel(), s.n_tx, s.n_rx,
                         s.power(), s.sigma2, s.separation());
}

CaseOutcome solve_capacity(CapacityProblem& problem, const CaseSettings& s, Rng& rng) {
  PenaltyOptions opts;
  opts.pgd = s.pgd;
  auto result = run_penalty_ao(problem, s.schedule, s.stop, rng, opts);
  auto out = outcome_from(problem);
  out.penalty = std::move(result);
  return out;
}

CaseOutcome run_capacity_case(const CaseSettings& s, Rng& rng) {
  auto problem = make_capacity_problem(sample_capacity_scenario(s, rng), s);
  return solve_capacity(problem, s, rng);
}

}  // namespace maopt
