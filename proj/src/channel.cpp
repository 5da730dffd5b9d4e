#include "irsee/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "irsee/random.hpp"

namespace irsee {

namespace {

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid scenario: " + what);
}

struct LinkWeights {
  double los;
  double nlos;
};

LinkWeights rician_weights(double db) {
  const double kappa = rician_factor(db);
  if (std::isinf(kappa)) return {1.0, 0.0};
  return {std::sqrt(kappa / (1.0 + kappa)), std::sqrt(1.0 / (1.0 + kappa))};
}

// Half-wavelength ULA along the x axis of the IRS. Element n picks up an
// extra phase of pi * n * cos(psi), psi measured against the array axis.
cd ula_response(const Vec3& irs, const Vec3& other, int n, double wavelength) {
  const double d = std::max(distance(irs, other), 1e-12);
  const double cos_psi = (other[0] - irs[0]) / d;
  const double phase = -kTwoPi * d / wavelength - kPi * n * cos_psi;
  return std::polar(1.0, phase);
}

}  // namespace

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

PhaseVector::PhaseVector(RVector theta) : theta_(std::move(theta)) {
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    theta_(i) = wrap_angle(theta_(i));
  }
}

PhaseVector PhaseVector::zeros(int size) {
  return PhaseVector(RVector::Zero(size));
}

PhaseVector PhaseVector::from_entries(const CVector& p) {
  RVector theta(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) theta(i) = std::arg(p(i));
  return PhaseVector(theta);
}

void PhaseVector::set_angle(int i, double angle) {
  theta_(i) = wrap_angle(angle);
}

CVector PhaseVector::entries() const {
  CVector p(theta_.size());
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    p(i) = cd(std::cos(theta_(i)), std::sin(theta_(i)));
  }
  return p;
}

void ScenarioConfig::validate() const {
  require(M >= 1 && K >= 1 && L >= 1 && N >= 1, "M, K, L, N must be >= 1");
  require(upsilon > 0.0 && upsilon <= 1.0, "upsilon must lie in (0, 1]");
  require(P_max > 0.0, "P_max must be positive");
  require(sigma2 > 0.0, "sigma2 must be positive");
  require(P_AP >= 0.0 && P_User >= 0.0 && P_IRS >= 0.0,
          "circuit powers must be non-negative");
  require(B > 0.0, "bandwidth must be positive");
  require(R_min >= 0.0, "R_min must be non-negative");
  require(beta1 >= 0.0 && beta2 >= 0.0, "penalty weights must be >= 0");
  require(wavelength > 0.0, "wavelength must be positive");
  require(user_radius >= 0.0, "user radius must be non-negative");
  require(static_cast<int>(ap_positions.size()) == M,
          "ap_positions must have M entries");
  require(static_cast<int>(irs_positions.size()) == L,
          "irs_positions must have L entries");
}

void ScenarioConfig::place_standard_geometry() {
  ap_positions.clear();
  for (int m = 0; m < M; ++m) ap_positions.push_back({10.0 * m, -40.0, 5.0});
  irs_positions.clear();
  // Two reference IRSs at x = 40 and x = 80; extra ones continue the spacing.
  for (int l = 0; l < L; ++l) {
    irs_positions.push_back({40.0 * (l + 1), 10.0, 10.0});
  }
}

ScenarioConfig ScenarioConfig::reference() {
  ScenarioConfig c;
  c.M = 13;
  c.K = 3;
  c.L = 2;
  c.N = 50;
  c.place_standard_geometry();
  return c;
}

ScenarioConfig ScenarioConfig::desk() {
  ScenarioConfig c;
  c.M = 4;
  c.K = 2;
  c.L = 2;
  c.N = 8;
  c.place_standard_geometry();
  // Four APs spread over the same 120 m strip the users move along.
  for (int m = 0; m < c.M; ++m) c.ap_positions[m] = {40.0 * m, -40.0, 5.0};
  return c;
}

PathLoss path_loss(double distance_m, double exponent, double ref_db) {
  PathLoss out;
  double d = distance_m;
  if (!(d >= 1.0)) {
    d = 1.0;
    out.clamped = true;
  }
  out.gain = std::pow(10.0, -ref_db / 10.0) * std::pow(d, -exponent);
  return out;
}

double rician_factor(double db) {
  if (std::isinf(db)) {
    return db < 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::pow(10.0, db / 10.0);
}

ChannelSet sample_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const int M = config.M, K = config.K, L = config.L, N = config.N;

  ChannelSet ch;
  ch.M = M;
  ch.K = K;
  ch.L = L;
  ch.N = N;

  const double t = uniform01(rng);
  const Vec3 center{
      config.center_start[0] + t * (config.center_end[0] - config.center_start[0]),
      config.center_start[1] + t * (config.center_end[1] - config.center_start[1]),
      0.0};
  for (int k = 0; k < K; ++k) {
    const double r = config.user_radius * std::sqrt(uniform01(rng));
    const double phi = kTwoPi * uniform01(rng);
    ch.user_positions.push_back(
        {center[0] + r * std::cos(phi), center[1] + r * std::sin(phi),
         config.user_height});
  }

  auto gain = [&](const Vec3& a, const Vec3& b, double exponent) {
    const PathLoss pl = path_loss(distance(a, b), exponent, config.pathloss_ref_db);
    ch.degenerate_geometry = ch.degenerate_geometry || pl.clamped;
    return std::sqrt(pl.gain);
  };

  // NLoS samples are always drawn so the stream layout is independent of
  // the Rician factors.
  const LinkWeights au = rician_weights(config.rician_db_au);
  ch.g_au.resize(K, M);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const Vec3& ap = config.ap_positions[m];
      const Vec3& user = ch.user_positions[k];
      const double d = distance(ap, user);
      const cd los = std::polar(1.0, -kTwoPi * d / config.wavelength);
      const cd nlos = complex_gaussian(rng);
      ch.g_au(k, m) = gain(ap, user, config.pathloss_exp_au) *
                      (au.los * los + au.nlos * nlos);
    }
  }

  const LinkWeights ai = rician_weights(config.rician_db_ai);
  const LinkWeights iu = rician_weights(config.rician_db_iu);
  ch.g_ai.assign(L, CMatrix(N, M));
  ch.g_iu.assign(L, std::vector<CVector>(K, CVector(N)));
  for (int l = 0; l < L; ++l) {
    const Vec3& irs = config.irs_positions[l];
    for (int m = 0; m < M; ++m) {
      const Vec3& ap = config.ap_positions[m];
      const double amp = gain(ap, irs, config.pathloss_exp_ai);
      for (int n = 0; n < N; ++n) {
        const cd los = ula_response(irs, ap, n, config.wavelength);
        const cd nlos = complex_gaussian(rng);
        ch.g_ai[l](n, m) = amp * (ai.los * los + ai.nlos * nlos);
      }
    }
    for (int k = 0; k < K; ++k) {
      const Vec3& user = ch.user_positions[k];
      const double amp = gain(irs, user, config.pathloss_exp_iu);
      for (int n = 0; n < N; ++n) {
        const cd los = ula_response(irs, user, n, config.wavelength);
        const cd nlos = complex_gaussian(rng);
        ch.g_iu[l][k](n) = amp * (iu.los * los + iu.nlos * nlos);
      }
    }
  }

  build_cascaded(ch);
  const double err = cascaded_consistency_error(ch);
  if (!(err < 1e-12)) {
    throw std::logic_error("cascaded channel construction inconsistent");
  }
  return ch;
}

void build_cascaded(ChannelSet& ch) {
  const int N = ch.N;
  ch.g_aiu.assign(ch.K, CMatrix::Zero(ch.I(), ch.M));
  for (int k = 0; k < ch.K; ++k) {
    for (int l = 0; l < ch.L; ++l) {
      ch.g_aiu[k].middleRows(l * N, N) =
          ch.g_iu[l][k].asDiagonal() * ch.g_ai[l];
    }
  }
}

double cascaded_consistency_error(const ChannelSet& ch) {
  if (!ch.has_components()) return 0.0;
  double worst = 0.0;
  for (int k = 0; k < ch.K; ++k) {
    for (int l = 0; l < ch.L; ++l) {
      CMatrix expected(ch.N, ch.M);
      for (int n = 0; n < ch.N; ++n) {
        for (int m = 0; m < ch.M; ++m) {
          expected(n, m) = ch.g_iu[l][k](n) * ch.g_ai[l](n, m);
        }
      }
      const double scale = std::max(expected.norm(), 1e-300);
      const double diff =
          (ch.g_aiu[k].middleRows(l * ch.N, ch.N) - expected).norm();
      worst = std::max(worst, diff / scale);
    }
  }
  return worst;
}

CRowVector aggregate_channel(const ChannelSet& ch, const PhaseVector& v,
                             int k) {
  CRowVector h = ch.g_au.row(k);
  if (ch.I() > 0) h += v.entries().transpose() * ch.g_aiu[k];
  return h;
}

CMatrix aggregate_channels(const ChannelSet& ch, const PhaseVector& v) {
  CMatrix H = ch.g_au;
  if (ch.I() > 0) {
    const CRowVector p = v.entries().transpose();
    for (int k = 0; k < ch.K; ++k) H.row(k) += p * ch.g_aiu[k];
  }
  return H;
}

}  // namespace irsee
