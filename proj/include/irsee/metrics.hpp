#pragma once

#include <string>
#include <vector>

#include "irsee/channel.hpp"
#include "irsee/types.hpp"

namespace irsee {

/// Slacks of the rate, per-AP power and unit-modulus constraints.
struct FeasibilityReport {
  RVector rate_slack;   // R_k - R_min, bit/s/Hz
  RVector power_slack;  // P_max - ||row_m||^2, W
  double modulus_deviation = 0.0;
  bool feasible = false;

  double max_violation() const;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

/// SINR of every user for a stacked aggregated channel H (K x M).
RVector sinrs(const CMatrix& H, const BeamMatrix& W, double sigma2);
/// Rates (bit/s/Hz) for a stacked aggregated channel.
RVector rates_from_channel(const CMatrix& H, const BeamMatrix& W,
                           double sigma2);

double user_rate(const ChannelSet& channels, const PhaseVector& v,
                 const BeamMatrix& W, double sigma2, int k);
RVector user_rates(const ChannelSet& channels, const PhaseVector& v,
                   const BeamMatrix& W, double sigma2);

/// alpha * ||W||_F^2 + P_fix.
double total_power(const BeamMatrix& W, const ScenarioConfig& config);

/// B * sum rate / total power, bit/Joule.
double energy_efficiency(const ChannelSet& channels, const PhaseVector& v,
                         const BeamMatrix& W, const ScenarioConfig& config);

FeasibilityReport check_feasibility(const ChannelSet& channels,
                                    const PhaseVector& v, const BeamMatrix& W,
                                    const ScenarioConfig& config);

/// EE - beta1 * sum [R_min - R_k]^+ - beta2 * sum [||row_m||^2 - P_max]^+.
/// The EE term carries B unless config.penalty_uses_bandwidth is false.
double penalized_objective(const ChannelSet& channels, const PhaseVector& v,
                           const BeamMatrix& W, const ScenarioConfig& config);

/// Ordering shared by the optimizers: a feasible point beats an infeasible
/// one, otherwise the higher EE wins.
inline bool ranks_above(double ee_a, bool feasible_a, double ee_b,
                        bool feasible_b) {
  if (feasible_a != feasible_b) return feasible_a;
  return ee_a > ee_b;
}

/// Largest unit-modulus deviation of a complex vector.
double modulus_deviation(const CVector& p);

struct Solution {
  BeamMatrix W;
  PhaseVector v;
  RVector rates;
  double ee = 0.0;
  FeasibilityReport report;
  std::vector<double> trace;  // objective per outer iteration
  std::vector<std::string> flags;
};

/// Fill rates, ee and report from (W, v).
Solution make_solution(const ChannelSet& channels, const ScenarioConfig& config,
                       BeamMatrix W, PhaseVector v);

}  // namespace irsee
