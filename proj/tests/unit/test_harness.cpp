#include <filesystem>
#include <numeric>

#include <gtest/gtest.h>

#include "irsee/alt_opt.hpp"
#include "irsee/harness.hpp"
#include "irsee/io.hpp"
#include "irsee/random.hpp"

namespace fs = std::filesystem;

namespace irsee {
namespace {

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("irsee_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

MonteCarloOptions Quick() {
  MonteCarloOptions mc;
  mc.ga.population = 8;
  mc.ga.generations = 5;
  mc.algorithm.max_outer_iterations = 3;
  return mc;
}

TEST(Percentile, LinearInterpolation) {
  std::vector<double> s(100);
  std::iota(s.begin(), s.end(), 1.0);
  EXPECT_NEAR(percentile_95_likely(s), 5.95, 1e-12);
  EXPECT_NEAR(percentile(s, 0.5), 50.5, 1e-12);
  EXPECT_DOUBLE_EQ(percentile_95_likely({3.0, 3.0, 3.0}), 3.0);
  EXPECT_DOUBLE_EQ(percentile_95_likely({7.5}), 7.5);
  EXPECT_THROW(percentile_95_likely({}), std::invalid_argument);
}

TEST(Summarize, CdfMonotoneToOne) {
  std::vector<TrialRecord> records;
  for (int t = 0; t < 10; ++t) {
    TrialRecord r;
    r.trial = t;
    r.scheme = "random";
    r.ee = (t * 7) % 10;
    records.push_back(r);
  }
  const RunReport rep = summarize(records);
  const SchemeSummary& s = rep.schemes.at("random");
  ASSERT_EQ(s.cdf.size(), 10u);
  for (std::size_t i = 1; i < s.cdf.size(); ++i) {
    EXPECT_GE(s.cdf[i].first, s.cdf[i - 1].first);
    EXPECT_GE(s.cdf[i].second, s.cdf[i - 1].second);
  }
  EXPECT_DOUBLE_EQ(s.cdf.back().second, 1.0);
  EXPECT_DOUBLE_EQ(s.p5, percentile(s.sorted_ee, 0.05));
}

TEST(MonteCarlo, SingleTrialRandomScheme) {
  const RunReport rep = run_monte_carlo(ScenarioConfig::desk(), {"random"}, 1, 3, Quick());
  ASSERT_EQ(rep.records.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.schemes.at("random").p5, rep.records[0].ee);
}

TEST(MonteCarlo, PairedAndDeterministic) {
  const ScenarioConfig c = ScenarioConfig::desk();
  MonteCarloOptions mc = Quick();
  mc.threads = 1;
  const RunReport a = run_monte_carlo(c, {"alternating", "random", "ga"}, 3, 5, mc);
  mc.threads = 3;
  const RunReport b = run_monte_carlo(c, {"alternating", "random", "ga"}, 3, 5, mc);
  EXPECT_EQ(records_csv(a.records), records_csv(b.records));
  EXPECT_EQ(report_json_text(a), report_json_text(b));
  ASSERT_EQ(a.records.size(), 9u);
  for (int i = 0; i < 9; i += 3) {
    EXPECT_EQ(a.records[i].seed, a.records[i + 1].seed);
    EXPECT_EQ(a.records[i].seed, a.records[i + 2].seed);
  }
}

TEST(MonteCarlo, RandomSchemeIsInitialPoint) {
  const ScenarioConfig c = ScenarioConfig::desk();
  const RunReport rep = run_monte_carlo(c, {"random"}, 2, 8, Quick());
  for (const TrialRecord& r : rep.records) {
    const ChannelSet ch = sample_scenario(c, r.seed);
    const Solution s =
        initial_point(ch, c, InitPolicy::kRandomPhases, scheme_seed(r.seed, "random"));
    EXPECT_DOUBLE_EQ(s.ee, r.ee);
  }
}

TEST(MonteCarlo, UnknownSchemeRejected) {
  EXPECT_THROW(run_monte_carlo(ScenarioConfig::desk(), {"magic"}, 1, 1, Quick()),
               std::invalid_argument);
}

TEST(RecordsCsv, RoundTripAndRecomputablePercentiles) {
  const RunReport rep = run_monte_carlo(ScenarioConfig::desk(), {"random"}, 6, 9, Quick());
  const std::string csv = records_csv(rep.records);
  const std::vector<TrialRecord> back = parse_records_csv(csv);
  ASSERT_EQ(back.size(), rep.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].ee, rep.records[i].ee);
    EXPECT_EQ(back[i].seed, rep.records[i].seed);
    EXPECT_TRUE(back[i].rates == rep.records[i].rates);
  }
  EXPECT_EQ(summarize(back).schemes.at("random").p5, rep.schemes.at("random").p5);
  EXPECT_EQ(csv.find("seconds"), std::string::npos);
}

TEST(WriteRunOutputs, Files) {
  const fs::path dir = Scratch("outputs");
  const RunReport rep = run_monte_carlo(ScenarioConfig::desk(), {"random"}, 2, 1, Quick());
  write_run_outputs(rep, dir);
  EXPECT_TRUE(fs::exists(dir / "records.csv"));
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "cdf_random.csv"));
  fs::remove_all(dir);
}

TEST(EvaluatePredictions, ReproducesStoredSolutionsAndZeroBeams) {
  const fs::path dir = Scratch("predictions");
  const ScenarioConfig c = ScenarioConfig::desk();
  export_dataset(c, 3, 21, dir / "set.jsonl");
  const Dataset set = read_dataset(dir / "set.jsonl");

  std::vector<Prediction> preds, zeros;
  std::vector<double> expected;
  for (int i = 0; i < 3; ++i) {
    const Solution s = run_alternating_optimization(set.samples[i], c, {}, i);
    preds.push_back({i, s.v.theta(), s.W});
    zeros.push_back({i, s.v.theta(), BeamMatrix::Zero(c.M, c.K)});
    expected.push_back(s.ee);
  }
  write_predictions(dir / "pred.jsonl", preds);
  write_predictions(dir / "zero.jsonl", zeros);

  const RunReport rep = evaluate_predictions(dir / "set.jsonl", dir / "pred.jsonl", c);
  std::vector<double> raw;
  for (const TrialRecord& r : rep.records)
    if (r.scheme == "predicted") raw.push_back(r.ee);
  ASSERT_EQ(raw.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(raw[i], expected[i], 1e-9 * expected[i]);

  const RunReport zero = evaluate_predictions(dir / "set.jsonl", dir / "zero.jsonl", c);
  for (const TrialRecord& r : zero.records) {
    EXPECT_EQ(r.ee, 0.0);
    EXPECT_FALSE(r.rate_feasible);
  }
  fs::remove_all(dir);
}

TEST(EvaluatePredictions, MismatchReportsIndex) {
  const fs::path dir = Scratch("mismatch");
  const ScenarioConfig c = ScenarioConfig::desk();
  export_dataset(c, 2, 1, dir / "set.jsonl");
  write_predictions(dir / "pred.jsonl",
                    {{0, RVector::Zero(c.I()), BeamMatrix::Zero(c.M, c.K)}});
  EXPECT_THROW(evaluate_predictions(dir / "set.jsonl", dir / "pred.jsonl", c),
               std::runtime_error);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace irsee
