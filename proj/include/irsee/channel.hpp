#pragma once

#include <cstdint>

#include "irsee/types.hpp"

namespace irsee {

struct PathLoss {
  double gain = 0.0;     // linear power gain
  bool clamped = false;  // distance was below the 1 m reference
};

/// 10^(-ref_db/10) * d^(-exponent), with d clamped to >= 1 m.
PathLoss path_loss(double distance_m, double exponent, double ref_db);

/// Rician factor in linear scale; -inf dB maps to 0 (pure NLoS).
double rician_factor(double db);

/// Draw user positions and all channels for one trial. Deterministic in seed.
ChannelSet sample_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Rebuild g_aiu from g_ai / g_iu.
void build_cascaded(ChannelSet& channels);

/// Max relative deviation of g_aiu from diag(g_iu) * g_ai, block by block.
double cascaded_consistency_error(const ChannelSet& channels);

/// h^H_k = v^H G_AIU,k + g^H_AU,k (1 x M).
CRowVector aggregate_channel(const ChannelSet& channels, const PhaseVector& v,
                             int k);

/// All aggregated channels stacked as a K x M matrix (row k = h^H_k).
CMatrix aggregate_channels(const ChannelSet& channels, const PhaseVector& v);

/// Number of real network input features, 2MIK + 2MK.
inline long feature_count(int M, int K, int I) {
  return 2L * M * I * K + 2L * M * K;
}

}  // namespace irsee
