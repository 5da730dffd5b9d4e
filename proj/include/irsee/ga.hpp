#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsee/channel.hpp"
#include "irsee/metrics.hpp"

namespace irsee {

struct GAConfig {
  int population = 50;
  int generations = 200;
  int tournament = 2;
  double crossover = 0.5;        // per-gene swap probability
  double mutation_w = 0.05;      // times sqrt(P_max)
  double mutation_theta = 0.1;   // rad
  int elitism = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // With B in the EE term the beta penalties are negligible and the search
  // ignores the rate targets, so fitness scores EE per Hz by default.
  bool fitness_uses_bandwidth = false;

  void validate() const;
};

/// Genome layout: Re W row-major (M x K), Im W row-major, then the I angles.
RVector encode_genome(const BeamMatrix& W, const PhaseVector& v);
void decode_genome(const RVector& genome, int M, int K, int I, BeamMatrix& W,
                   PhaseVector& v);

struct GAGeneration {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
};

struct GAResult {
  Solution solution;
  RVector best_genome;
  double best_fitness = 0.0;
  std::vector<GAGeneration> history;
};

/// Real-coded GA: tournament selection, uniform crossover, Gaussian
/// mutation, elitism. Fitness is penalized_objective after per-AP power
/// projection (written back into the genome). Seeds, when given, replace the
/// first individuals of the random initial population.
GAResult run_ga(const ChannelSet& channels, const ScenarioConfig& config,
                const GAConfig& ga, const std::vector<RVector>& seeds = {});

std::string ga_history_csv(const std::vector<GAGeneration>& history);

}  // namespace irsee
