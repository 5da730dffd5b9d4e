#include "irsee/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "irsee/beam_opt.hpp"
#include "irsee/parallel.hpp"
#include "irsee/random.hpp"

namespace irsee {

void GAConfig::validate() const {
  if (population < 2) throw std::invalid_argument("GA population must be >= 2");
  if (generations < 0) throw std::invalid_argument("GA generations must be >= 0");
  if (tournament < 1) throw std::invalid_argument("GA tournament must be >= 1");
  if (elitism < 1 || elitism > population) {
    throw std::invalid_argument("GA elitism must be in [1, population]");
  }
  if (crossover < 0.0 || crossover > 1.0) {
    throw std::invalid_argument("GA crossover probability must be in [0, 1]");
  }
  if (mutation_w < 0.0 || mutation_theta < 0.0) {
    throw std::invalid_argument("GA mutation std must be >= 0");
  }
}

RVector encode_genome(const BeamMatrix& W, const PhaseVector& v) {
  const Eigen::Index M = W.rows(), K = W.cols();
  RVector g(2 * M * K + v.size());
  for (Eigen::Index m = 0; m < M; ++m) {
    for (Eigen::Index k = 0; k < K; ++k) {
      g(m * K + k) = W(m, k).real();
      g(M * K + m * K + k) = W(m, k).imag();
    }
  }
  g.tail(v.size()) = v.theta();
  return g;
}

void decode_genome(const RVector& genome, int M, int K, int I, BeamMatrix& W,
                   PhaseVector& v) {
  if (genome.size() != 2L * M * K + I) {
    throw std::invalid_argument("genome length does not match 2MK + I");
  }
  W.resize(M, K);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      W(m, k) = cd(genome(m * K + k), genome(M * K + m * K + k));
    }
  }
  v = PhaseVector(genome.tail(I));
}

namespace {

struct Individual {
  RVector genome;
  double fitness = 0.0;
};

// Project and wrap in place, then score.
double evaluate(Individual& ind, const ChannelSet& ch,
                const ScenarioConfig& config) {
  BeamMatrix W;
  PhaseVector v;
  decode_genome(ind.genome, ch.M, ch.K, ch.I(), W, v);
  W = project_row_power(W, config.P_max);
  ind.genome = encode_genome(W, v);
  ind.fitness = penalized_objective(ch, v, W, config);
  return ind.fitness;
}

}  // namespace

GAResult run_ga(const ChannelSet& channels, const ScenarioConfig& config,
                const GAConfig& ga, const std::vector<RVector>& seeds) {
  ga.validate();
  ScenarioConfig scoring = config;
  scoring.penalty_uses_bandwidth = ga.fitness_uses_bandwidth;
  const int M = channels.M, K = channels.K, I = channels.I();
  const int wgenes = 2 * M * K;
  const int length = wgenes + I;
  Rng rng(ga.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Individual> pop(ga.population);
  const double init_std = std::sqrt(config.P_max / (2.0 * K));
  for (int i = 0; i < ga.population; ++i) {
    if (i < static_cast<int>(seeds.size())) {
      if (seeds[i].size() != length) {
        throw std::invalid_argument("GA seed genome has wrong length");
      }
      pop[i].genome = seeds[i];
      continue;
    }
    pop[i].genome.resize(length);
    for (int g = 0; g < wgenes; ++g) pop[i].genome(g) = init_std * normal(rng);
    for (int g = wgenes; g < length; ++g) {
      pop[i].genome(g) = kTwoPi * uniform01(rng);
    }
  }

  auto evaluate_all = [&](std::vector<Individual>& group) {
    parallel_for(group.size(),
                 [&](std::size_t i) { evaluate(group[i], channels, scoring); },
                 ga.threads);
  };
  evaluate_all(pop);

  GAResult result;
  auto best_of = [](const std::vector<Individual>& group) {
    return std::max_element(group.begin(), group.end(),
                            [](const Individual& a, const Individual& b) {
                              return a.fitness < b.fitness;
                            });
  };
  Individual best = *best_of(pop);

  auto record = [&](int generation) {
    double mean = 0.0;
    for (const auto& ind : pop) mean += ind.fitness;
    result.history.push_back(
        {generation, best.fitness, mean / static_cast<double>(pop.size())});
  };
  record(0);

  const double sigma_w = ga.mutation_w * std::sqrt(config.P_max);
  auto tournament = [&]() -> const Individual& {
    std::uniform_int_distribution<int> pick(0, ga.population - 1);
    int winner = pick(rng);
    for (int t = 1; t < ga.tournament; ++t) {
      const int challenger = pick(rng);
      if (pop[challenger].fitness > pop[winner].fitness) winner = challenger;
    }
    return pop[winner];
  };

  for (int gen = 1; gen <= ga.generations; ++gen) {
    std::vector<int> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pop[a].fitness > pop[b].fitness;
    });

    std::vector<Individual> next;
    next.reserve(pop.size());
    for (int e = 0; e < ga.elitism; ++e) next.push_back(pop[order[e]]);

    std::vector<Individual> children;
    while (static_cast<int>(next.size() + children.size()) < ga.population) {
      const Individual& a = tournament();
      const Individual& b = tournament();
      Individual child;
      child.genome.resize(length);
      for (int g = 0; g < length; ++g) {
        child.genome(g) = uniform01(rng) < ga.crossover ? b.genome(g) : a.genome(g);
      }
      for (int g = 0; g < length; ++g) {
        const double sd = g < wgenes ? sigma_w : ga.mutation_theta;
        const double noise = normal(rng);
        if (sd > 0.0) child.genome(g) += sd * noise;
        if (g >= wgenes) child.genome(g) = wrap_angle(child.genome(g));
      }
      children.push_back(std::move(child));
    }
    evaluate_all(children);
    for (auto& c : children) next.push_back(std::move(c));
    pop = std::move(next);

    const auto it = best_of(pop);
    if (it->fitness > best.fitness) best = *it;
    record(gen);
  }

  BeamMatrix W;
  PhaseVector v;
  decode_genome(best.genome, M, K, I, W, v);
  result.solution = make_solution(channels, config, W, v);
  for (const auto& h : result.history) result.solution.trace.push_back(h.best);
  result.best_genome = best.genome;
  result.best_fitness = best.fitness;
  return result;
}

std::string ga_history_csv(const std::vector<GAGeneration>& history) {
  std::ostringstream os;
  os.precision(17);
  os << "generation,best_fitness,mean_fitness\n";
  for (const auto& h : history) {
    os << h.generation << ',' << h.best << ',' << h.mean << '\n';
  }
  return os.str();
}

}  // namespace irsee
