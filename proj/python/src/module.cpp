#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "irsee/alt_opt.hpp"
#include "irsee/channel.hpp"
#include "irsee/ga.hpp"
#include "irsee/harness.hpp"
#include "irsee/io.hpp"
#include "irsee/metrics.hpp"

namespace py = pybind11;
using namespace irsee;

namespace {

py::dict report_dict(const FeasibilityReport& r) {
  py::dict d;
  d["rate_slack"] = r.rate_slack;
  d["power_slack"] = r.power_slack;
  d["modulus_deviation"] = r.modulus_deviation;
  d["feasible"] = r.feasible;
  return d;
}

py::dict solution_dict(const Solution& s) {
  py::dict d;
  d["W"] = s.W;
  d["theta"] = s.v.theta();
  d["rates"] = s.rates;
  d["ee"] = s.ee;
  d["report"] = report_dict(s.report);
  d["trace"] = s.trace;
  d["flags"] = s.flags;
  return d;
}

py::dict run_report_dict(const RunReport& rep) {
  py::dict schemes;
  for (const auto& [name, s] : rep.schemes) {
    py::dict d;
    d["sorted_ee"] = s.sorted_ee;
    d["ee_95_likely"] = s.p5;
    d["median"] = s.median;
    d["mean"] = s.mean;
    d["feasible"] = s.feasible;
    d["failures"] = s.failures;
    schemes[py::str(name)] = d;
  }
  py::list records;
  for (const TrialRecord& r : rep.records) {
    py::dict d;
    d["trial"] = r.trial;
    d["seed"] = r.seed;
    d["scheme"] = r.scheme;
    d["ee"] = r.ee;
    d["rates"] = r.rates;
    d["feasible"] = r.feasible;
    records.append(d);
  }
  py::dict out;
  out["schemes"] = schemes;
  out["records"] = records;
  return out;
}

PhaseVector phases(const RVector& theta) { return PhaseVector(theta); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-efficiency optimization for IRS-aided cell-free massive MIMO";

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_static("desk", &ScenarioConfig::desk)
      .def_static("reference", &ScenarioConfig::reference)
      .def_static("from_json", &config_from_json_text)
      .def("to_json", &config_to_json_text)
      .def("validate", &ScenarioConfig::validate)
      .def("place_standard_geometry", &ScenarioConfig::place_standard_geometry)
      .def_property_readonly("I", &ScenarioConfig::I)
      .def_property_readonly("P_fix", &ScenarioConfig::P_fix)
      .def_readwrite("M", &ScenarioConfig::M)
      .def_readwrite("K", &ScenarioConfig::K)
      .def_readwrite("L", &ScenarioConfig::L)
      .def_readwrite("N", &ScenarioConfig::N)
      .def_readwrite("ap_positions", &ScenarioConfig::ap_positions)
      .def_readwrite("irs_positions", &ScenarioConfig::irs_positions)
      .def_readwrite("P_max", &ScenarioConfig::P_max)
      .def_readwrite("R_min", &ScenarioConfig::R_min)
      .def_readwrite("sigma2", &ScenarioConfig::sigma2)
      .def_readwrite("upsilon", &ScenarioConfig::upsilon)
      .def_readwrite("P_AP", &ScenarioConfig::P_AP)
      .def_readwrite("P_User", &ScenarioConfig::P_User)
      .def_readwrite("P_IRS", &ScenarioConfig::P_IRS)
      .def_readwrite("B", &ScenarioConfig::B)
      .def_readwrite("beta1", &ScenarioConfig::beta1)
      .def_readwrite("beta2", &ScenarioConfig::beta2)
      .def_readwrite("penalty_uses_bandwidth", &ScenarioConfig::penalty_uses_bandwidth);

  py::class_<ChannelSet>(m, "ChannelSet")
      .def_readonly("M", &ChannelSet::M)
      .def_readonly("K", &ChannelSet::K)
      .def_readonly("L", &ChannelSet::L)
      .def_readonly("N", &ChannelSet::N)
      .def_readonly("g_au", &ChannelSet::g_au)
      .def_readonly("g_aiu", &ChannelSet::g_aiu)
      .def_readonly("user_positions", &ChannelSet::user_positions)
      .def_property_readonly("I", &ChannelSet::I);

  m.def("path_loss", [](double d, double e, double ref) { return path_loss(d, e, ref).gain; },
        py::arg("distance_m"), py::arg("exponent"), py::arg("ref_db"));
  m.def("sample_scenario", &sample_scenario, py::arg("config"), py::arg("seed"));
  m.def("feature_count", &feature_count);
  m.def(
      "aggregate_channels",
      [](const ChannelSet& ch, const RVector& theta) { return aggregate_channels(ch, phases(theta)); },
      py::arg("channels"), py::arg("theta"));
  m.def(
      "user_rates",
      [](const ChannelSet& ch, const RVector& theta, const BeamMatrix& W, double sigma2) {
        return user_rates(ch, phases(theta), W, sigma2);
      },
      py::arg("channels"), py::arg("theta"), py::arg("W"), py::arg("sigma2"));
  m.def("total_power", &total_power, py::arg("W"), py::arg("config"));
  m.def(
      "energy_efficiency",
      [](const ChannelSet& ch, const RVector& theta, const BeamMatrix& W,
         const ScenarioConfig& c) { return energy_efficiency(ch, phases(theta), W, c); },
      py::arg("channels"), py::arg("theta"), py::arg("W"), py::arg("config"));
  m.def(
      "penalized_objective",
      [](const ChannelSet& ch, const RVector& theta, const BeamMatrix& W,
         const ScenarioConfig& c) { return penalized_objective(ch, phases(theta), W, c); },
      py::arg("channels"), py::arg("theta"), py::arg("W"), py::arg("config"));
  m.def(
      "check_feasibility",
      [](const ChannelSet& ch, const RVector& theta, const BeamMatrix& W,
         const ScenarioConfig& c) { return report_dict(check_feasibility(ch, phases(theta), W, c)); },
      py::arg("channels"), py::arg("theta"), py::arg("W"), py::arg("config"));

  m.def(
      "optimize",
      [](const ChannelSet& ch, const ScenarioConfig& c, std::uint64_t seed,
         const std::string& backend, int max_outer_iterations) {
        AlgorithmOptions opts;
        opts.phase.backend = parse_phase_backend(backend);
        opts.max_outer_iterations = max_outer_iterations;
        py::gil_scoped_release release;
        Solution s = run_alternating_optimization(ch, c, opts, seed);
        py::gil_scoped_acquire acquire;
        return solution_dict(s);
      },
      py::arg("channels"), py::arg("config"), py::arg("seed") = 1, py::arg("backend") = "bcd",
      py::arg("max_outer_iterations") = 30);
  m.def(
      "run_ga",
      [](const ChannelSet& ch, const ScenarioConfig& c, std::uint64_t seed, int population,
         int generations) {
        GAConfig ga;
        ga.seed = seed;
        ga.population = population;
        ga.generations = generations;
        py::gil_scoped_release release;
        GAResult r = run_ga(ch, c, ga);
        py::gil_scoped_acquire acquire;
        return solution_dict(r.solution);
      },
      py::arg("channels"), py::arg("config"), py::arg("seed") = 1, py::arg("population") = 50,
      py::arg("generations") = 200);
  m.def(
      "run_monte_carlo",
      [](const ScenarioConfig& c, const std::vector<std::string>& schemes, int trials,
         std::uint64_t seed, unsigned threads) {
        MonteCarloOptions mc;
        mc.threads = threads;
        py::gil_scoped_release release;
        RunReport rep = run_monte_carlo(c, schemes, trials, seed, mc);
        py::gil_scoped_acquire acquire;
        return run_report_dict(rep);
      },
      py::arg("config"), py::arg("schemes"), py::arg("trials"), py::arg("seed") = 1,
      py::arg("threads") = 0);
  m.def("percentile_95_likely", &percentile_95_likely, py::arg("samples"));
  m.def("export_dataset", &export_dataset, py::arg("config"), py::arg("count"),
        py::arg("seed"), py::arg("path"));
  m.def(
      "evaluate_predictions",
      [](const std::filesystem::path& dataset, const std::filesystem::path& predictions,
         const ScenarioConfig& c) {
        return run_report_dict(evaluate_predictions(dataset, predictions, c));
      },
      py::arg("dataset_path"), py::arg("predictions_path"), py::arg("config"));
}
