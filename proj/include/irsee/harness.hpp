#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "irsee/alt_opt.hpp"
#include "irsee/ga.hpp"
#include "irsee/metrics.hpp"

namespace irsee {

/// Schemes understood by the Monte-Carlo driver.
///   "alternating" - alternating optimization (phase backend from options)
///   "ga"          - genetic-algorithm baseline
///   "random"      - random phases with the budget-scaled matched filter
std::vector<std::string> known_schemes();

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string scheme;
  double ee = 0.0;
  RVector rates;
  bool feasible = false;
  bool rate_feasible = false;
  bool power_feasible = false;
  bool failed = false;
  double seconds = 0.0;  // wall clock, never written to record files
};

struct SchemeSummary {
  std::vector<double> sorted_ee;
  std::vector<std::pair<double, double>> cdf;  // (ee, P[EE <= ee])
  double p5 = 0.0;  // 95%-likely EE
  double median = 0.0;
  double mean = 0.0;
  double mean_seconds = 0.0;
  int failures = 0;
  int feasible = 0;
};

struct RunReport {
  std::map<std::string, SchemeSummary> schemes;
  std::vector<TrialRecord> records;  // ordered by (trial, scheme list order)
};

struct MonteCarloOptions {
  AlgorithmOptions algorithm;
  GAConfig ga;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Linear interpolation between order statistics at position q (n - 1).
double percentile(std::vector<double> samples, double q);
/// The EE exceeded with probability 0.95, i.e. the 5th percentile.
double percentile_95_likely(const std::vector<double>& samples);

/// Aggregate records into per-scheme summaries.
RunReport summarize(std::vector<TrialRecord> records);

/// Per trial: derive a seed, draw one ChannelSet, run every scheme on it.
RunReport run_monte_carlo(const ScenarioConfig& config,
                          const std::vector<std::string>& schemes, int trials,
                          std::uint64_t seed,
                          const MonteCarloOptions& options = {});

/// Seed handed to `scheme` within the trial drawn from trial_seed.
std::uint64_t scheme_seed(std::uint64_t trial_seed, const std::string& scheme);

/// Run a single named scheme on one channel realization.
Solution run_scheme(const std::string& scheme, const ChannelSet& channels,
                    const ScenarioConfig& config,
                    const MonteCarloOptions& options, std::uint64_t seed);

std::string records_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_records_csv(const std::string& text);
/// Deterministic JSON summary (runtime excluded unless include_timing).
std::string report_json_text(const RunReport& report,
                             bool include_timing = false);
std::string cdf_csv(const SchemeSummary& summary);

/// Write records.csv, report.json and cdf_<scheme>.csv into a directory.
void write_run_outputs(const RunReport& report,
                       const std::filesystem::path& directory);

/// Score predicted (theta, W) per dataset sample with the metrics module.
/// Produces scheme "predicted" (raw W) and "predicted-projected" (W after
/// per-AP power projection).
RunReport evaluate_predictions(const std::filesystem::path& dataset_path,
                               const std::filesystem::path& predictions_path,
                               const ScenarioConfig& config);

}  // namespace irsee
