#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "irsee/channel.hpp"
#include "irsee/metrics.hpp"

namespace irsee {

/// Parse a JSON scenario. Keys mirror ScenarioConfig; power-like fields
/// (P_max, sigma2, P_AP, P_User, P_IRS) accept a plain watt value or a
/// `_db` (dBW) / `_dbm` suffixed variant. Rician factors may be "-inf".
/// An optional "preset" ("desk" or "reference") provides the base values.
ScenarioConfig config_from_json_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Canonical echo in watts, suitable for config_from_json_text.
std::string config_to_json_text(const ScenarioConfig& config);

std::string feasibility_to_json_text(const FeasibilityReport& report);
std::string solution_to_json_text(const Solution& solution);

struct DatasetHeader {
  int version = 1;
  int M = 0, K = 0, L = 0, N = 0, I = 0;
  long count = 0;
  std::uint64_t seed = 0;
  long feature_count = 0;
  std::string config_json;
};

struct Dataset {
  DatasetHeader header;
  std::vector<ChannelSet> samples;  // g_au and g_aiu only
};

/// Line-delimited JSON: one header object, then one record per sample with
/// g_AU (K x M) and G_AIU (K x I x M) as nested [re, im] pairs.
/// Sample i is drawn with sample_scenario(config, derive_seed(seed, i)).
void export_dataset(const ScenarioConfig& config, long count,
                    std::uint64_t seed, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// One predicted operating point, as written by the trainer:
/// {"sample_index": i, "theta": [I], "W_re_im": [Re W row-major, Im W row-major]}.
struct Prediction {
  long sample_index = 0;
  RVector theta;
  BeamMatrix W;
};

std::vector<Prediction> read_predictions(const std::filesystem::path& path,
                                         int M, int K, int I);
void write_predictions(const std::filesystem::path& path,
                       const std::vector<Prediction>& predictions);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace irsee
