#pragma once

#include <cstdint>

#include "irsee/beam_opt.hpp"
#include "irsee/channel.hpp"
#include "irsee/metrics.hpp"
#include "irsee/phase_opt.hpp"

namespace irsee {

enum class InitPolicy {
  kRandomPhases,  // uniform angles, matched filter scaled to the budget
  kZeroPhases,    // all angles zero, matched filter scaled to the budget
};

struct AlgorithmOptions {
  int max_outer_iterations = 30;  // T
  double outer_tolerance = 1e-4;  // relative EE gain
  BeamSolverOptions beam;
  PhaseOptions phase;
  InitPolicy init = InitPolicy::kRandomPhases;
};

/// Initial point used by run_alternating_optimization and the
/// random-phase matched-filter baseline.
Solution initial_point(const ChannelSet& channels, const ScenarioConfig& config,
                       InitPolicy policy, std::uint64_t seed);

/// initial_point, followed by one beamforming run when it misses the rate
/// targets. The repaired point is used only if it is feasible.
Solution feasible_start(const ChannelSet& channels,
                        const ScenarioConfig& config, InitPolicy policy,
                        std::uint64_t seed, const BeamSolverOptions& beam);

/// Alternate beamforming and phase optimization until the relative EE gain
/// of a full pass drops below the tolerance or T passes are done. The
/// returned Solution is the best iterate under ranks_above; trace[0] is the
/// initial EE and trace[t] the incumbent EE after outer pass t. If the
/// incumbent only becomes feasible mid-run, the trace restarts there and the
/// flag "trace_restarted_at_feasibility" is set.
Solution run_alternating_optimization(const ChannelSet& channels,
                                      const ScenarioConfig& config,
                                      const AlgorithmOptions& opts,
                                      std::uint64_t seed);

}  // namespace irsee
