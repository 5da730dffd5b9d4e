#include "irsee/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "irsee/random.hpp"

namespace irsee {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error(what);
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path.string() + ": cannot open for writing");
  return out;
}

double db_value(const json& j, const std::string& key) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    fail("config field '" + key + "': expected a number or \"-inf\"");
  }
  if (!j.is_number()) fail("config field '" + key + "': expected a number");
  return j.get<double>();
}

json db_json(double value) {
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  return value;
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3) {
    fail("config field '" + key + "': expected [x, y] or [x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(),
          j.size() == 3 ? j[2].get<double>() : 0.0};
}

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) fail("expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_json(const CMatrix& A) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < A.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < A.cols(); ++c) row.push_back(complex_json(A(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    fail("matrix has wrong number of rows");
  }
  CMatrix A(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail("matrix has wrong number of columns");
    }
    for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = complex_from(row[c]);
  }
  return A;
}

const std::set<std::string> kPowerFields = {"P_max", "sigma2", "P_AP", "P_User",
                                            "P_IRS"};

double* power_field(ScenarioConfig& c, const std::string& name) {
  if (name == "P_max") return &c.P_max;
  if (name == "sigma2") return &c.sigma2;
  if (name == "P_AP") return &c.P_AP;
  if (name == "P_User") return &c.P_User;
  if (name == "P_IRS") return &c.P_IRS;
  return nullptr;
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");

  ScenarioConfig c = ScenarioConfig::desk();
  if (j.contains("preset")) {
    const std::string preset = j["preset"].get<std::string>();
    if (preset == "desk") {
      c = ScenarioConfig::desk();
    } else if (preset == "reference") {
      c = ScenarioConfig::reference();
    } else {
      fail("unknown preset '" + preset + "'");
    }
  }

  bool explicit_ap = false, explicit_irs = false;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const json& val = it.value();
    auto num = [&] {
      if (!val.is_number()) fail("config field '" + key + "': expected a number");
      return val.get<double>();
    };
    auto integer = [&] {
      if (!val.is_number_integer()) fail("config field '" + key + "': expected an integer");
      return val.get<int>();
    };
    if (key == "preset") continue;
    if (key == "M") c.M = integer();
    else if (key == "K") c.K = integer();
    else if (key == "L") c.L = integer();
    else if (key == "N") c.N = integer();
    else if (key == "ap_positions" || key == "irs_positions") {
      std::vector<Vec3> pts;
      if (!val.is_array()) fail("config field '" + key + "': expected an array");
      for (const auto& p : val) pts.push_back(vec3_from(p, key));
      if (key == "ap_positions") {
        c.ap_positions = pts;
        explicit_ap = true;
      } else {
        c.irs_positions = pts;
        explicit_irs = true;
      }
    }
    else if (key == "center_start") c.center_start = vec3_from(val, key);
    else if (key == "center_end") c.center_end = vec3_from(val, key);
    else if (key == "user_radius") c.user_radius = num();
    else if (key == "user_height") c.user_height = num();
    else if (key == "pathloss_ref_db") c.pathloss_ref_db = num();
    else if (key == "pathloss_exp_ai") c.pathloss_exp_ai = num();
    else if (key == "pathloss_exp_iu") c.pathloss_exp_iu = num();
    else if (key == "pathloss_exp_au") c.pathloss_exp_au = num();
    else if (key == "rician_db_ai") c.rician_db_ai = db_value(val, key);
    else if (key == "rician_db_iu") c.rician_db_iu = db_value(val, key);
    else if (key == "rician_db_au") c.rician_db_au = db_value(val, key);
    else if (key == "wavelength") c.wavelength = num();
    else if (key == "R_min") c.R_min = num();
    else if (key == "upsilon") c.upsilon = num();
    else if (key == "B") c.B = num();
    else if (key == "beta1") c.beta1 = num();
    else if (key == "beta2") c.beta2 = num();
    else if (key == "penalty_uses_bandwidth") c.penalty_uses_bandwidth = val.get<bool>();
    else {
      std::string base = key;
      double scale_db = std::numeric_limits<double>::quiet_NaN();
      if (key.size() > 4 && key.ends_with("_dbm")) {
        base = key.substr(0, key.size() - 4);
        scale_db = -30.0;
      } else if (key.size() > 3 && key.ends_with("_db")) {
        base = key.substr(0, key.size() - 3);
        scale_db = 0.0;
      }
      double* field = power_field(c, base);
      if (!field) fail("unknown config field '" + key + "'");
      *field = std::isnan(scale_db) ? num()
                                    : std::pow(10.0, (num() + scale_db) / 10.0);
    }
  }
  // Preset positions survive unless M or L changed their count.
  const auto ap = c.ap_positions;
  const auto irs = c.irs_positions;
  c.place_standard_geometry();
  if (explicit_ap || static_cast<int>(ap.size()) == c.M) c.ap_positions = ap;
  if (explicit_irs || static_cast<int>(irs.size()) == c.L) c.irs_positions = irs;
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json_text(read_text(path));
  } catch (const std::exception& e) {
    fail(path.string() + ": " + e.what());
  }
}

namespace {

json config_json(const ScenarioConfig& c) {
  json j;
  j["M"] = c.M;
  j["K"] = c.K;
  j["L"] = c.L;
  j["N"] = c.N;
  j["ap_positions"] = json::array();
  for (const auto& p : c.ap_positions) j["ap_positions"].push_back(vec3_json(p));
  j["irs_positions"] = json::array();
  for (const auto& p : c.irs_positions) j["irs_positions"].push_back(vec3_json(p));
  j["center_start"] = vec3_json(c.center_start);
  j["center_end"] = vec3_json(c.center_end);
  j["user_radius"] = c.user_radius;
  j["user_height"] = c.user_height;
  j["pathloss_ref_db"] = c.pathloss_ref_db;
  j["pathloss_exp_ai"] = c.pathloss_exp_ai;
  j["pathloss_exp_iu"] = c.pathloss_exp_iu;
  j["pathloss_exp_au"] = c.pathloss_exp_au;
  j["rician_db_ai"] = db_json(c.rician_db_ai);
  j["rician_db_iu"] = db_json(c.rician_db_iu);
  j["rician_db_au"] = db_json(c.rician_db_au);
  j["wavelength"] = c.wavelength;
  j["P_max"] = c.P_max;
  j["R_min"] = c.R_min;
  j["sigma2"] = c.sigma2;
  j["upsilon"] = c.upsilon;
  j["P_AP"] = c.P_AP;
  j["P_User"] = c.P_User;
  j["P_IRS"] = c.P_IRS;
  j["B"] = c.B;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["penalty_uses_bandwidth"] = c.penalty_uses_bandwidth;
  return j;
}

json report_json(const FeasibilityReport& r) {
  json j;
  j["feasible"] = r.feasible;
  j["rate_slack"] = std::vector<double>(r.rate_slack.begin(), r.rate_slack.end());
  j["power_slack"] =
      std::vector<double>(r.power_slack.begin(), r.power_slack.end());
  j["modulus_deviation"] = r.modulus_deviation;
  return j;
}

}  // namespace

std::string config_to_json_text(const ScenarioConfig& config) {
  return config_json(config).dump(2);
}

std::string feasibility_to_json_text(const FeasibilityReport& report) {
  return report_json(report).dump(2);
}

std::string solution_to_json_text(const Solution& s) {
  json j;
  j["ee"] = s.ee;
  j["rates"] = std::vector<double>(s.rates.begin(), s.rates.end());
  j["theta"] = std::vector<double>(s.v.theta().begin(), s.v.theta().end());
  j["W"] = matrix_json(s.W);
  j["report"] = report_json(s.report);
  j["trace"] = s.trace;
  j["flags"] = s.flags;
  return j.dump(2);
}

void export_dataset(const ScenarioConfig& config, long count,
                    std::uint64_t seed, const std::filesystem::path& path) {
  if (count < 1) throw std::invalid_argument("export_dataset: count must be >= 1");
  config.validate();
  std::ofstream out = open_for_writing(path);

  json header;
  header["format"] = "irsee-channels";
  header["version"] = 1;
  header["M"] = config.M;
  header["K"] = config.K;
  header["L"] = config.L;
  header["N"] = config.N;
  header["I"] = config.I();
  header["count"] = count;
  header["seed"] = seed;
  header["feature_count"] = feature_count(config.M, config.K, config.I());
  header["config"] = config_json(config);
  out << header.dump() << '\n';

  for (long i = 0; i < count; ++i) {
    const std::uint64_t sample_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    const ChannelSet ch = sample_scenario(config, sample_seed);
    json rec;
    rec["index"] = i;
    rec["seed"] = sample_seed;
    rec["g_AU"] = matrix_json(ch.g_au);
    json g = json::array();
    for (const auto& G : ch.g_aiu) g.push_back(matrix_json(G));
    rec["G_AIU"] = std::move(g);
    out << rec.dump() << '\n';
  }
  out.flush();
  if (!out) fail(path.string() + ": write failed");
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path.string() + ": cannot open dataset");
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) fail(path.string() + ": empty dataset");
  try {
    const json h = json::parse(line);
    if (h.value("format", "") != "irsee-channels") fail("not an irsee channel dataset");
    ds.header.version = h.at("version").get<int>();
    ds.header.M = h.at("M").get<int>();
    ds.header.K = h.at("K").get<int>();
    ds.header.L = h.at("L").get<int>();
    ds.header.N = h.at("N").get<int>();
    ds.header.I = h.at("I").get<int>();
    ds.header.count = h.at("count").get<long>();
    ds.header.seed = h.at("seed").get<std::uint64_t>();
    ds.header.feature_count = h.at("feature_count").get<long>();
    ds.header.config_json = h.at("config").dump();
  } catch (const json::exception& e) {
    fail(path.string() + ": bad header: " + e.what());
  }
  const auto& hd = ds.header;
  if (hd.I != hd.L * hd.N) fail(path.string() + ": header I != L * N");
  long index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      ChannelSet ch;
      ch.M = hd.M;
      ch.K = hd.K;
      ch.L = hd.L;
      ch.N = hd.N;
      ch.g_au = matrix_from(rec.at("g_AU"), hd.K, hd.M);
      const json& g = rec.at("G_AIU");
      if (!g.is_array() || static_cast<int>(g.size()) != hd.K) {
        fail("G_AIU must hold K matrices");
      }
      for (int k = 0; k < hd.K; ++k) ch.g_aiu.push_back(matrix_from(g[k], hd.I, hd.M));
      ds.samples.push_back(std::move(ch));
    } catch (const std::exception& e) {
      fail(path.string() + ": sample " + std::to_string(index) + ": " + e.what());
    }
    ++index;
  }
  if (static_cast<long>(ds.samples.size()) != hd.count) {
    fail(path.string() + ": header count " + std::to_string(hd.count) +
         " but found " + std::to_string(ds.samples.size()) + " samples");
  }
  return ds;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path,
                                         int M, int K, int I) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path.string() + ": cannot open predictions");
  std::vector<Prediction> out;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const json rec = json::parse(line);
      Prediction p;
      p.sample_index = rec.at("sample_index").get<long>();
      const auto theta = rec.at("theta").get<std::vector<double>>();
      const auto w = rec.at("W_re_im").get<std::vector<double>>();
      if (static_cast<int>(theta.size()) != I) fail("theta must have I entries");
      if (static_cast<long>(w.size()) != 2L * M * K) fail("W_re_im must have 2MK entries");
      p.theta = Eigen::Map<const RVector>(theta.data(), I);
      p.W.resize(M, K);
      for (int m = 0; m < M; ++m) {
        for (int k = 0; k < K; ++k) {
          p.W(m, k) = cd(w[m * K + k], w[M * K + m * K + k]);
        }
      }
      for (int i = 0; i < I; ++i) {
        if (!std::isfinite(p.theta(i))) fail("theta is not finite");
      }
      if (!p.W.allFinite()) fail("W is not finite");
      out.push_back(std::move(p));
    } catch (const std::exception& e) {
      fail(path.string() + ": prediction " + std::to_string(row) + ": " + e.what());
    }
    ++row;
  }
  return out;
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<Prediction>& predictions) {
  std::ofstream out = open_for_writing(path);
  for (const auto& p : predictions) {
    json rec;
    rec["sample_index"] = p.sample_index;
    rec["theta"] = std::vector<double>(p.theta.begin(), p.theta.end());
    const Eigen::Index M = p.W.rows(), K = p.W.cols();
    std::vector<double> w(2 * M * K);
    for (Eigen::Index m = 0; m < M; ++m) {
      for (Eigen::Index k = 0; k < K; ++k) {
        w[m * K + k] = p.W(m, k).real();
        w[M * K + m * K + k] = p.W(m, k).imag();
      }
    }
    rec["W_re_im"] = std::move(w);
    out << rec.dump() << '\n';
  }
  if (!out) fail(path.string() + ": write failed");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_for_writing(path);
  out << text;
  if (!out) fail(path.string() + ": write failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace irsee
