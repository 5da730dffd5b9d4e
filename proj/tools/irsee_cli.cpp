// irsee: command-line driver for the IRS-aided cell-free EE toolkit.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irsee/alt_opt.hpp"
#include "irsee/channel.hpp"
#include "irsee/ga.hpp"
#include "irsee/harness.hpp"
#include "irsee/io.hpp"

namespace fs = std::filesystem;
using namespace irsee;

namespace {

struct Common {
  std::string config_path;
  std::string preset = "desk";
  std::uint64_t seed = 1;
  std::string backend = "bcd";
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool with_backend) {
  app->add_option("--config", c.config_path, "Scenario JSON file");
  app->add_option("--preset", c.preset, "Base scenario when no --config")
      ->check(CLI::IsMember({"desk", "reference"}));
  app->add_option("--seed", c.seed, "Master seed");
  if (with_backend) {
    app->add_option("--backend", c.backend, "Phase backend")
        ->check(CLI::IsMember({"bcd", "sdr"}));
  }
}

ScenarioConfig resolve_config(const Common& c) {
  if (!c.config_path.empty()) return load_config(c.config_path);
  return c.preset == "reference" ? ScenarioConfig::reference()
                                 : ScenarioConfig::desk();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_summary(const RunReport& report) {
  for (const auto& [name, s] : report.schemes) {
    std::cout << name << ": trials=" << s.sorted_ee.size()
              << " ee_95_likely=" << s.p5 << " median=" << s.median
              << " mean=" << s.mean << " feasible=" << s.feasible
              << " failures=" << s.failures
              << " mean_seconds=" << s.mean_seconds << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficiency optimization for IRS-aided cell-free MIMO"};
  app.require_subcommand(1);

  Common sim;
  int trials = 50;
  std::string schemes = "alternating,random";
  int ga_population = 50, ga_generations = 200;
  unsigned threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo sweep");
  add_common(simulate, sim, true);
  simulate->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--scheme", schemes,
                       "Comma-separated schemes: alternating, ga, random");
  simulate->add_option("--ga-population", ga_population);
  simulate->add_option("--ga-generations", ga_generations);
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  Common opt;
  int max_outer = 30;
  auto* optimize = app.add_subcommand("optimize", "Alternating optimization on one instance");
  add_common(optimize, opt, true);
  optimize->add_option("--max-iterations", max_outer, "Outer iteration cap T");
  optimize->add_option("--out", opt.out, "Output directory")->required();

  Common gac;
  GAConfig ga_cfg;
  auto* ga = app.add_subcommand("ga", "Genetic-algorithm baseline on one instance");
  add_common(ga, gac, false);
  ga->add_option("--population", ga_cfg.population);
  ga->add_option("--generations", ga_cfg.generations);
  ga->add_option("--out", gac.out, "Output directory")->required();

  Common exp;
  long count = 1000;
  auto* export_ds = app.add_subcommand("export-dataset", "Write a channel dataset");
  add_common(export_ds, exp, false);
  export_ds->add_option("--count", count, "Number of samples")->check(CLI::PositiveNumber);
  export_ds->add_option("--out", exp.out, "Output .jsonl file")->required();

  Common ev;
  std::string dataset_path, predictions_path;
  auto* eval = app.add_subcommand("eval-predictions", "Score predicted (theta, W) per sample");
  add_common(eval, ev, false);
  eval->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--predictions", predictions_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--out", ev.out, "Output directory")->required();

  std::string records_path, report_out;
  auto* report = app.add_subcommand("report", "Recompute CDF and percentiles from records");
  report->add_option("--records", records_path)->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const ScenarioConfig config = resolve_config(sim);
      MonteCarloOptions mc;
      mc.algorithm.phase.backend = parse_phase_backend(sim.backend);
      mc.ga.population = ga_population;
      mc.ga.generations = ga_generations;
      mc.threads = threads;
      const RunReport r =
          run_monte_carlo(config, split_list(schemes), trials, sim.seed, mc);
      write_run_outputs(r, sim.out);
      print_summary(r);
    } else if (*optimize) {
      const ScenarioConfig config = resolve_config(opt);
      const ChannelSet ch = sample_scenario(config, opt.seed);
      AlgorithmOptions ao;
      ao.max_outer_iterations = max_outer;
      ao.phase.backend = parse_phase_backend(opt.backend);
      const Solution s = run_alternating_optimization(ch, config, ao, opt.seed);
      fs::create_directories(opt.out);
      write_text(fs::path(opt.out) / "solution.json", solution_to_json_text(s) + "\n");
      std::ostringstream trace;
      trace << "iteration,ee\n";
      trace.precision(17);
      for (std::size_t t = 0; t < s.trace.size(); ++t) {
        trace << t << ',' << s.trace[t] << '\n';
      }
      write_text(fs::path(opt.out) / "trace.csv", trace.str());
      std::cout << "ee=" << s.ee << " feasible=" << s.report.feasible
                << " iterations=" << s.trace.size() - 1 << '\n';
    } else if (*ga) {
      const ScenarioConfig config = resolve_config(gac);
      const ChannelSet ch = sample_scenario(config, gac.seed);
      ga_cfg.seed = gac.seed;
      const GAResult r = run_ga(ch, config, ga_cfg);
      fs::create_directories(gac.out);
      write_text(fs::path(gac.out) / "solution.json",
                 solution_to_json_text(r.solution) + "\n");
      write_text(fs::path(gac.out) / "ga_history.csv", ga_history_csv(r.history));
      std::cout << "ee=" << r.solution.ee << " fitness=" << r.best_fitness
                << " feasible=" << r.solution.report.feasible << '\n';
    } else if (*export_ds) {
      const ScenarioConfig config = resolve_config(exp);
      export_dataset(config, count, exp.seed, exp.out);
      std::cout << "wrote " << count << " samples, "
                << feature_count(config.M, config.K, config.I())
                << " features each, to " << exp.out << '\n';
    } else if (*eval) {
      const ScenarioConfig config = resolve_config(ev);
      const RunReport r = evaluate_predictions(dataset_path, predictions_path, config);
      write_run_outputs(r, ev.out);
      print_summary(r);
    } else if (*report) {
      const RunReport r = summarize(parse_records_csv(read_text(records_path)));
      fs::create_directories(report_out);
      write_text(fs::path(report_out) / "report.json", report_json_text(r));
      for (const auto& [name, s] : r.schemes) {
        write_text(fs::path(report_out) / ("cdf_" + name + ".csv"), cdf_csv(s));
      }
      print_summary(r);
    }
  } catch (const std::exception& e) {
    std::cerr << "irsee: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
