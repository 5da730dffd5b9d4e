#include "irsee/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "irsee/beam_opt.hpp"
#include "irsee/io.hpp"
#include "irsee/parallel.hpp"
#include "irsee/random.hpp"

namespace irsee {

std::uint64_t scheme_seed(std::uint64_t trial_seed, const std::string& scheme) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : scheme) h = (h ^ c) * 1099511628211ULL;
  return derive_seed(trial_seed, h);
}

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

TrialRecord make_record(int trial, std::uint64_t seed, const std::string& scheme,
                        const Solution& s, double seconds) {
  TrialRecord r;
  r.trial = trial;
  r.seed = seed;
  r.scheme = scheme;
  r.ee = s.ee;
  r.rates = s.rates;
  r.feasible = s.report.feasible;
  r.rate_feasible = s.report.rate_slack.size() == 0 ||
                    s.report.rate_slack.minCoeff() >= -kFeasibilityTolerance;
  r.power_feasible = s.report.power_slack.size() == 0 ||
                     s.report.power_slack.minCoeff() >= -kFeasibilityTolerance;
  r.seconds = seconds;
  return r;
}

}  // namespace

std::vector<std::string> known_schemes() {
  return {"alternating", "ga", "random"};
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("percentile of no samples");
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

double percentile_95_likely(const std::vector<double>& samples) {
  return percentile(samples, 0.05);
}

RunReport summarize(std::vector<TrialRecord> records) {
  RunReport report;
  std::map<std::string, std::vector<const TrialRecord*>> by_scheme;
  for (const auto& r : records) by_scheme[r.scheme].push_back(&r);
  for (const auto& [name, group] : by_scheme) {
    SchemeSummary s;
    double seconds = 0.0;
    for (const auto* r : group) {
      s.sorted_ee.push_back(r->ee);
      seconds += r->seconds;
      s.failures += r->failed ? 1 : 0;
      s.feasible += r->feasible ? 1 : 0;
    }
    std::sort(s.sorted_ee.begin(), s.sorted_ee.end());
    const double n = static_cast<double>(s.sorted_ee.size());
    for (std::size_t i = 0; i < s.sorted_ee.size(); ++i) {
      s.cdf.emplace_back(s.sorted_ee[i], static_cast<double>(i + 1) / n);
    }
    s.p5 = percentile_95_likely(s.sorted_ee);
    s.median = percentile(s.sorted_ee, 0.5);
    s.mean = std::accumulate(s.sorted_ee.begin(), s.sorted_ee.end(), 0.0) / n;
    s.mean_seconds = seconds / n;
    report.schemes[name] = std::move(s);
  }
  report.records = std::move(records);
  return report;
}

Solution run_scheme(const std::string& scheme, const ChannelSet& channels,
                    const ScenarioConfig& config,
                    const MonteCarloOptions& options, std::uint64_t seed) {
  if (scheme == "alternating") {
    return run_alternating_optimization(channels, config, options.algorithm,
                                        seed);
  }
  if (scheme == "ga") {
    GAConfig ga = options.ga;
    ga.seed = seed;
    return run_ga(channels, config, ga).solution;
  }
  if (scheme == "random") {
    return initial_point(channels, config, InitPolicy::kRandomPhases, seed);
  }
  throw std::invalid_argument("unknown scheme '" + scheme + "'");
}

RunReport run_monte_carlo(const ScenarioConfig& config,
                          const std::vector<std::string>& schemes, int trials,
                          std::uint64_t seed,
                          const MonteCarloOptions& options) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  config.validate();
  const auto known = known_schemes();
  for (const auto& s : schemes) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw std::invalid_argument("unknown scheme '" + s + "'");
    }
  }
  const std::size_t per_trial = schemes.size();
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials) * per_trial);

  parallel_for(
      static_cast<std::size_t>(trials),
      [&](std::size_t t) {
        const std::uint64_t trial_seed = derive_seed(seed, t);
        const ChannelSet channels = sample_scenario(config, trial_seed);
        for (std::size_t s = 0; s < per_trial; ++s) {
          const std::string& name = schemes[s];
          const auto start = std::chrono::steady_clock::now();
          TrialRecord rec;
          try {
            const Solution sol = run_scheme(name, channels, config, options,
                                            scheme_seed(trial_seed, name));
            const double secs = std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
            rec = make_record(static_cast<int>(t), trial_seed, name, sol, secs);
          } catch (const std::exception&) {
            rec.trial = static_cast<int>(t);
            rec.seed = trial_seed;
            rec.scheme = name;
            rec.ee = 0.0;
            rec.rates = RVector::Zero(config.K);
            rec.failed = true;
          }
          records[t * per_trial + s] = std::move(rec);
        }
      },
      options.threads);
  return summarize(std::move(records));
}

std::string records_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream os;
  os << "trial,seed,scheme,ee,feasible,rate_feasible,power_feasible,failed,rates\n";
  for (const auto& r : records) {
    os << r.trial << ',' << r.seed << ',' << r.scheme << ',' << format_double(r.ee)
       << ',' << int(r.feasible) << ',' << int(r.rate_feasible) << ','
       << int(r.power_feasible) << ',' << int(r.failed) << ',';
    for (Eigen::Index k = 0; k < r.rates.size(); ++k) {
      if (k) os << ';';
      os << format_double(r.rates(k));
    }
    os << '\n';
  }
  return os.str();
}

std::vector<TrialRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("trial,", 0) != 0) {
    throw std::runtime_error("records: missing header");
  }
  std::vector<TrialRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 9) {
      throw std::runtime_error("records line " + std::to_string(lineno) +
                               ": expected 9 fields");
    }
    try {
      TrialRecord r;
      r.trial = std::stoi(f[0]);
      r.seed = std::stoull(f[1]);
      r.scheme = f[2];
      r.ee = std::stod(f[3]);
      r.feasible = f[4] == "1";
      r.rate_feasible = f[5] == "1";
      r.power_feasible = f[6] == "1";
      r.failed = f[7] == "1";
      std::vector<double> rates;
      std::stringstream rs(f[8]);
      while (std::getline(rs, cell, ';')) {
        if (!cell.empty()) rates.push_back(std::stod(cell));
      }
      r.rates = Eigen::Map<RVector>(rates.data(), static_cast<Eigen::Index>(rates.size()));
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("records line " + std::to_string(lineno) +
                               ": malformed number");
    }
  }
  return out;
}

std::string report_json_text(const RunReport& report, bool include_timing) {
  nlohmann::json j;
  j["schemes"] = nlohmann::json::object();
  for (const auto& [name, s] : report.schemes) {
    nlohmann::json e;
    e["trials"] = s.sorted_ee.size();
    e["ee_95_likely"] = s.p5;
    e["ee_median"] = s.median;
    e["ee_mean"] = s.mean;
    e["failures"] = s.failures;
    e["feasible"] = s.feasible;
    e["sorted_ee"] = s.sorted_ee;
    if (include_timing) e["mean_seconds"] = s.mean_seconds;
    j["schemes"][name] = std::move(e);
  }
  return j.dump(2) + "\n";
}

std::string cdf_csv(const SchemeSummary& summary) {
  std::ostringstream os;
  os << "ee,probability\n";
  for (const auto& [ee, p] : summary.cdf) {
    os << format_double(ee) << ',' << format_double(p) << '\n';
  }
  return os.str();
}

void write_run_outputs(const RunReport& report,
                       const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  write_text(directory / "records.csv", records_csv(report.records));
  write_text(directory / "report.json", report_json_text(report));
  for (const auto& [name, s] : report.schemes) {
    write_text(directory / ("cdf_" + name + ".csv"), cdf_csv(s));
  }
}

RunReport evaluate_predictions(const std::filesystem::path& dataset_path,
                               const std::filesystem::path& predictions_path,
                               const ScenarioConfig& config) {
  const Dataset ds = read_dataset(dataset_path);
  const auto& h = ds.header;
  if (h.M != config.M || h.K != config.K || h.I != config.I()) {
    throw std::runtime_error("dataset dimensions do not match the config");
  }
  const auto preds = read_predictions(predictions_path, h.M, h.K, h.I);
  if (preds.size() != ds.samples.size()) {
    throw std::runtime_error("predictions hold " + std::to_string(preds.size()) +
                             " samples but the dataset holds " +
                             std::to_string(ds.samples.size()));
  }
  std::vector<TrialRecord> records;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Prediction& p = preds[i];
    if (p.sample_index != static_cast<long>(i)) {
      throw std::runtime_error("prediction " + std::to_string(i) +
                               ": sample_index " + std::to_string(p.sample_index) +
                               " out of order");
    }
    const ChannelSet& ch = ds.samples[i];
    const PhaseVector v(p.theta);
    const std::uint64_t seed = derive_seed(h.seed, i);
    records.push_back(make_record(static_cast<int>(i), seed, "predicted",
                                  make_solution(ch, config, p.W, v), 0.0));
    records.push_back(make_record(
        static_cast<int>(i), seed, "predicted-projected",
        make_solution(ch, config, project_row_power(p.W, config.P_max), v), 0.0));
  }
  return summarize(std::move(records));
}

}  // namespace irsee
