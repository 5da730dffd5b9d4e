#include "irsee/alt_opt.hpp"

#include <algorithm>

#include "irsee/random.hpp"

namespace irsee {

Solution initial_point(const ChannelSet& channels, const ScenarioConfig& config,
                       InitPolicy policy, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1417));
  PhaseVector v = policy == InitPolicy::kRandomPhases
                      ? random_phases(channels.I(), rng)
                      : PhaseVector::zeros(channels.I());
  BeamMatrix W = matched_filter(aggregate_channels(channels, v), config.P_max);
  return make_solution(channels, config, std::move(W), std::move(v));
}

Solution feasible_start(const ChannelSet& channels,
                        const ScenarioConfig& config, InitPolicy policy,
                        std::uint64_t seed, const BeamSolverOptions& beam) {
  Solution start = initial_point(channels, config, policy, seed);
  if (start.report.feasible) return start;
  BeamMatrix W = optimize_beamforming(channels, start.v, start.W, config, beam).W;
  Solution repaired = make_solution(channels, config, std::move(W), start.v);
  return repaired.report.feasible ? repaired : start;
}

Solution run_alternating_optimization(const ChannelSet& channels,
                                      const ScenarioConfig& config,
                                      const AlgorithmOptions& opts,
                                      std::uint64_t seed) {
  Solution best = feasible_start(channels, config, opts.init, seed, opts.beam);
  std::vector<double> trace{best.ee};
  std::vector<std::string> flags;

  BeamMatrix W = best.W;
  PhaseVector v = best.v;
  for (int t = 1; t <= std::max(1, opts.max_outer_iterations); ++t) {
    const BeamOptResult beam =
        optimize_beamforming(channels, v, W, config, opts.beam);
    if (beam.stalled) flags.push_back("beam_stalled");
    W = beam.W;

    PhaseOptions phase_opts = opts.phase;
    phase_opts.seed = derive_seed(seed, 0x9000 + t);
    const PhaseOptResult phase =
        optimize_phases(channels, W, v, config, phase_opts);
    flags.insert(flags.end(), phase.flags.begin(), phase.flags.end());
    v = phase.v;

    Solution current = make_solution(channels, config, W, v);
    const double previous = best.ee;
    const bool became_feasible = current.report.feasible && !best.report.feasible;
    const double gain = (current.ee - previous) / std::max(previous, 1e-300);
    if (ranks_above(current.ee, current.report.feasible, best.ee,
                    best.report.feasible)) {
      best = std::move(current);
    }
    // EE is only comparable within one feasibility class, so the trace
    // restarts at the first feasible incumbent.
    if (became_feasible) {
      trace.clear();
      flags.push_back("trace_restarted_at_feasibility");
    }
    trace.push_back(best.ee);
    if (!became_feasible && !(gain >= opts.outer_tolerance)) break;
  }

  best.trace = std::move(trace);
  std::sort(flags.begin(), flags.end());
  flags.erase(std::unique(flags.begin(), flags.end()), flags.end());
  best.flags = std::move(flags);
  return best;
}

}  // namespace irsee
