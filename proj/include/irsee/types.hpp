#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace irsee {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using RVector = Eigen::VectorXd;

/// M x K beamforming matrix. Column k is w_k, row m is the per-AP vector.
using BeamMatrix = Eigen::MatrixXcd;

using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Physical, power and penalty parameters of one system instance.
/// All powers are stored in watts; dB/dBm conversion happens at load time.
struct ScenarioConfig {
  int M = 4;  // APs
  int K = 2;  // users
  int L = 2;  // IRSs
  int N = 8;  // elements per IRS

  std::vector<Vec3> ap_positions;
  std::vector<Vec3> irs_positions;

  // Users are dropped uniformly in a disk whose center is uniform on the
  // segment [center_start, center_end] (z ignored), at height user_height.
  Vec3 center_start{0.0, 0.0, 0.0};
  Vec3 center_end{120.0, 0.0, 0.0};
  double user_radius = 2.0;
  double user_height = 1.65;

  double pathloss_ref_db = 30.0;
  double pathloss_exp_ai = 2.2;
  double pathloss_exp_iu = 2.8;
  double pathloss_exp_au = 3.5;
  double rician_db_ai = 10.0;
  double rician_db_iu = 5.0;
  double rician_db_au = -std::numeric_limits<double>::infinity();
  double wavelength = 0.1;  // metres, LoS phase reference

  double P_max = 1.0;      // W per AP
  double R_min = 1.0;      // bit/s/Hz
  double sigma2 = 1e-9;    // W
  double upsilon = 0.8;    // amplifier efficiency
  double P_AP = 0.01;      // W
  double P_User = 0.01;    // W
  double P_IRS = 0.001;    // W per element
  double B = 1e6;          // Hz
  double beta1 = 50.0;
  double beta2 = 50.0;
  bool penalty_uses_bandwidth = true;

  int I() const { return L * N; }
  double alpha() const { return 1.0 / upsilon; }
  double P_fix() const { return M * P_AP + K * P_User + I() * P_IRS; }

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  /// Full-size geometry: 13 APs, 3 users, 2 IRSs of 50 elements.
  static ScenarioConfig reference();
  /// Small preset used by tests and CI: 4 APs, 2 users, 2 IRSs of 8 elements.
  static ScenarioConfig desk();
  /// Fill ap_positions / irs_positions with the standard layout for M and L.
  void place_standard_geometry();
};

/// Unit-modulus reflection coefficients. Entry i is p_i = exp(j theta_i),
/// the i-th component of the row vector v^H.
class PhaseVector {
 public:
  PhaseVector() = default;
  explicit PhaseVector(RVector theta);
  static PhaseVector zeros(int size);
  static PhaseVector from_entries(const CVector& p);

  int size() const { return static_cast<int>(theta_.size()); }
  const RVector& theta() const { return theta_; }
  void set_angle(int i, double angle);

  /// p (entries of v^H), exactly unit modulus.
  CVector entries() const;
  /// v = conj(p) as a column.
  CVector v() const { return entries().conjugate(); }

 private:
  RVector theta_;
};

/// Wrap an angle into [0, 2 pi).
double wrap_angle(double angle);

/// One realization of every channel in the system.
///
/// g_au row k holds g^H_{AU,k}. g_iu[l][k] holds the N entries of the row
/// vector g^H_{IU,lk}. g_aiu[k] is the stacked I x M cascaded matrix whose
/// row-block l equals diag(g^H_{IU,lk}) G_{AI,l}. Sets restored from a
/// dataset carry only g_au and g_aiu.
struct ChannelSet {
  int M = 0;
  int K = 0;
  int L = 0;
  int N = 0;
  CMatrix g_au;
  std::vector<CMatrix> g_ai;
  std::vector<std::vector<CVector>> g_iu;
  std::vector<CMatrix> g_aiu;

  std::vector<Vec3> user_positions;
  bool degenerate_geometry = false;

  int I() const { return L * N; }
  bool has_components() const { return !g_ai.empty(); }
};

}  // namespace irsee
