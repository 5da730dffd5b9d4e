#include "irsee/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace irsee {

double FeasibilityReport::max_violation() const {
  double worst = std::max(0.0, modulus_deviation);
  for (Eigen::Index i = 0; i < rate_slack.size(); ++i) {
    worst = std::max(worst, -rate_slack(i));
  }
  for (Eigen::Index i = 0; i < power_slack.size(); ++i) {
    worst = std::max(worst, -power_slack(i));
  }
  return worst;
}

RVector sinrs(const CMatrix& H, const BeamMatrix& W, double sigma2) {
  const CMatrix HW = H * W;  // (k, j) = h^H_k w_j
  const Eigen::Index K = HW.rows();
  RVector out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double signal = std::norm(HW(k, k));
    const double total = HW.row(k).squaredNorm();
    out(k) = signal / (total - signal + sigma2);
  }
  return out;
}

RVector rates_from_channel(const CMatrix& H, const BeamMatrix& W,
                           double sigma2) {
  RVector s = sinrs(H, W, sigma2);
  for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = std::log2(1.0 + s(k));
  return s;
}

double user_rate(const ChannelSet& channels, const PhaseVector& v,
                 const BeamMatrix& W, double sigma2, int k) {
  const CRowVector h = aggregate_channel(channels, v, k);
  const CRowVector hw = h * W;
  const double signal = std::norm(hw(k));
  const double interference = hw.squaredNorm() - signal;
  return std::log2(1.0 + signal / (interference + sigma2));
}

RVector user_rates(const ChannelSet& channels, const PhaseVector& v,
                   const BeamMatrix& W, double sigma2) {
  return rates_from_channel(aggregate_channels(channels, v), W, sigma2);
}

double total_power(const BeamMatrix& W, const ScenarioConfig& config) {
  return config.alpha() * W.squaredNorm() + config.P_fix();
}

double energy_efficiency(const ChannelSet& channels, const PhaseVector& v,
                         const BeamMatrix& W, const ScenarioConfig& config) {
  const double sum_rate = user_rates(channels, v, W, config.sigma2).sum();
  return config.B * sum_rate / total_power(W, config);
}

double modulus_deviation(const CVector& p) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    worst = std::max(worst, std::abs(std::abs(p(i)) - 1.0));
  }
  return worst;
}

FeasibilityReport check_feasibility(const ChannelSet& channels,
                                    const PhaseVector& v, const BeamMatrix& W,
                                    const ScenarioConfig& config) {
  FeasibilityReport r;
  r.rate_slack = user_rates(channels, v, W, config.sigma2).array() - config.R_min;
  r.power_slack = config.P_max - W.rowwise().squaredNorm().array();
  r.modulus_deviation = modulus_deviation(v.entries());
  r.feasible = r.rate_slack.minCoeff() >= -kFeasibilityTolerance &&
               r.power_slack.minCoeff() >= -kFeasibilityTolerance &&
               r.modulus_deviation <= kFeasibilityTolerance;
  return r;
}

double penalized_objective(const ChannelSet& channels, const PhaseVector& v,
                           const BeamMatrix& W, const ScenarioConfig& config) {
  const RVector rates = user_rates(channels, v, W, config.sigma2);
  const double power = total_power(W, config);
  const double scale = config.penalty_uses_bandwidth ? config.B : 1.0;
  const double ee = scale * rates.sum() / power;
  const double rate_penalty =
      (config.R_min - rates.array()).max(0.0).sum();
  const double power_penalty =
      (W.rowwise().squaredNorm().array() - config.P_max).max(0.0).sum();
  return ee - config.beta1 * rate_penalty - config.beta2 * power_penalty;
}

Solution make_solution(const ChannelSet& channels, const ScenarioConfig& config,
                       BeamMatrix W, PhaseVector v) {
  Solution s;
  s.W = std::move(W);
  s.v = std::move(v);
  s.rates = user_rates(channels, s.v, s.W, config.sigma2);
  s.ee = config.B * s.rates.sum() / total_power(s.W, config);
  s.report = check_feasibility(channels, s.v, s.W, config);
  return s;
}

}  // namespace irsee
