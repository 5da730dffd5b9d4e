#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "irsee/channel.hpp"
#include "irsee/metrics.hpp"
#include "irsee/types.hpp"

namespace irsee {

/// a_kj = G_AIU,k w_j (I-vector) and b_kj = g^H_AU,k w_j, so that
/// v^H a_kj + b_kj = h^H_k w_j.
struct CascadedCoefficients {
  int K = 0;
  int I = 0;
  std::vector<CVector> a;  // row-major K x K
  CMatrix b;               // K x K

  const CVector& at(int k, int j) const { return a[k * K + j]; }
  /// v^H a_kj + b_kj for every pair.
  CMatrix received(const PhaseVector& v) const;
};

CascadedCoefficients build_coefficients(const ChannelSet& channels,
                                        const BeamMatrix& W);

/// gamma_k = SINR_k at v.
RVector update_gamma(const PhaseVector& v, const CascadedCoefficients& coeffs,
                     double sigma2);

/// eps_k = sqrt(1 + gamma_k) s_kk / (sum_j |s_kj|^2 + sigma2).
CVector update_epsilon(const PhaseVector& v, const RVector& gamma,
                       const CascadedCoefficients& coeffs, double sigma2);

/// Theta = sum_kj |eps_k|^2 a_kj a_kj^H,
/// u = sum_k (sqrt(1 + gamma_k) eps_k^* a_kk - |eps_k|^2 sum_j b_kj^* a_kj).
struct QuadraticForm {
  CMatrix Theta;
  CVector u;
};

QuadraticForm build_quadratic_form(const RVector& gamma, const CVector& epsilon,
                                   const CascadedCoefficients& coeffs);

/// -v^H Theta v + 2 Re{v^H u}.
double quadratic_part(const PhaseVector& v, const CMatrix& Theta,
                      const CVector& u);

/// Terms of the transformed sum rate that do not depend on v.
double f2_constant(const RVector& gamma, const CVector& epsilon,
                   const CascadedCoefficients& coeffs, double sigma2);

/// sum_k (log2(1 + gamma_k) - gamma_k) + quadratic_part, plus f2_constant
/// when with_constant is set.
double eval_f2(const PhaseVector& v, const RVector& gamma,
               const CVector& epsilon, const QuadraticForm& form,
               bool with_constant, const CascadedCoefficients& coeffs,
               double sigma2);

/// Closed-form coordinate ascent on quadratic_part: each angle is set to
/// -arg(u_i - sum_{j != i} Theta_ij conj(p_j)); a zero coefficient leaves
/// the angle unchanged.
PhaseVector bcd_phase_update(const PhaseVector& v, const CMatrix& Theta,
                             const CVector& u, int passes);

/// Lifted problem over Q = q q^H with q = [conj(p); 1]:
/// maximize trace(ThetaBar Q) subject to unit diagonal, Q PSD and the
/// linearized rate constraints.
struct SDRProblem {
  int K = 0;
  int I = 0;
  CMatrix theta_bar;            // (I+1) x (I+1)
  std::vector<CMatrix> C;       // row-major K x K, each (I+1) x (I+1)
  Eigen::MatrixXd b_abs2;       // |b_kj|^2
  double sigma2 = 0.0;
  double R_min = 0.0;

  const CMatrix& c_at(int k, int j) const { return C[k * K + j]; }
  double objective(const CMatrix& Q) const;
};

SDRProblem build_sdr(const QuadraticForm& form,
                     const CascadedCoefficients& coeffs, double sigma2,
                     double R_min);

/// q = [conj(p); 1] for a phase vector.
CVector lift(const PhaseVector& v);

struct SDROptions {
  int max_iterations = 20000;
  double rho = 1.0;
  double tolerance = 1e-10;
  bool enforce_rate_constraints = true;
};

struct SDRResult {
  CMatrix Q;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  bool rate_constraints_dropped = false;
};

/// ADMM splitting between the affine set (unit diagonal plus rate
/// half-spaces, handled through non-negative multipliers) and the PSD cone
/// (eigenvalue clipping). The returned Q has an exactly unit diagonal.
SDRResult solve_sdr(const SDRProblem& problem, const SDROptions& opts = {});

using PhaseEvaluator = std::function<double(const PhaseVector&)>;

/// Draw num_candidates vectors S r (Q = S S^H, r ~ CN(0, I)), de-rotate by
/// the last coordinate and keep the best under evaluator (default:
/// quadratic_part of the problem's ThetaBar).
PhaseVector gaussian_randomization(const CMatrix& Q, const SDRProblem& problem,
                                   int num_candidates, std::uint64_t seed,
                                   const PhaseEvaluator& evaluator = {});

enum class PhaseBackend { kBcd, kSdr };

PhaseBackend parse_phase_backend(const std::string& name);
std::string to_string(PhaseBackend backend);

struct PhaseOptions {
  PhaseBackend backend = PhaseBackend::kBcd;
  int bcd_passes = 5;
  SDROptions sdr;
  int candidates = 100;
  std::uint64_t seed = 0;
  double ee_tolerance = 1e-4;
  int max_iterations = 50;
};

struct PhaseTraceRow {
  int iteration = 0;
  double f2_bare = 0.0;
  double sum_rate = 0.0;
  double ee = 0.0;
  double modulus_deviation = 0.0;
};

struct PhaseOptResult {
  PhaseVector v;
  std::vector<PhaseTraceRow> trace;
  std::vector<std::string> flags;
};

/// Refresh (gamma, eps), update v with the chosen backend, keep the new
/// point only if the sum rate improves. Stops when the relative gain falls
/// below opts.ee_tolerance.
PhaseOptResult optimize_phases(const ChannelSet& channels, const BeamMatrix& W,
                               const PhaseVector& v_init,
                               const ScenarioConfig& config,
                               const PhaseOptions& opts = {});

std::string phase_trace_csv(const std::vector<PhaseTraceRow>& trace);

}  // namespace irsee
