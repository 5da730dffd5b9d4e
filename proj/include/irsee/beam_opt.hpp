#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irsee/channel.hpp"
#include "irsee/metrics.hpp"
#include "irsee/types.hpp"

namespace irsee {

/// Quadratic-transform auxiliaries for the beamforming subproblem.
struct BeamFPState {
  CVector y;
  double z = 0.0;
};

struct BeamSolverOptions {
  int max_iterations = 400;      // projected-gradient steps per penalty stage
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  double penalty_weight = 10.0;  // initial weight on the rate residuals
  double penalty_growth = 2.0;
  double penalty_cap = 1e10;
  double violation_tolerance = 1e-7;  // normalized rate residual
  double tolerance = 1e-10;           // relative change of the surrogate
  double ee_tolerance = 1e-4;         // relative EE gain between passes
  int max_passes = 50;
};

/// y_k = h^H_k w_k / (sum_{j != k} |h^H_k w_j|^2 + sigma2).
CVector update_y(const CMatrix& H, const BeamMatrix& W, double sigma2);

/// z = sqrt(sum rate) / total power (no bandwidth factor).
double update_z(const CMatrix& H, const BeamMatrix& W,
                const ScenarioConfig& config);

/// Quadratic-transform surrogate f1(W, y, z). Returns nullopt when some
/// 1 + 2Re{y_k^* h^H_k w_k} - |y_k|^2 (...) is not positive; the caller
/// must refresh y. The sum under the square root is clamped at zero.
std::optional<double> eval_f1(const CMatrix& H, const BeamMatrix& W,
                              const CVector& y, double z,
                              const ScenarioConfig& config);

/// Gradient of f1 in the real-pair convention d/dRe + j d/dIm.
BeamMatrix f1_gradient(const CMatrix& H, const BeamMatrix& W, const CVector& y,
                       double z, const ScenarioConfig& config);

/// Sum of squared positive parts of the normalized second-order-cone
/// residuals (sqrt(interference + sigma2) - Re{h^H_k w_k}/tau) / sigma,
/// tau = (1 + 1e-6) sqrt(2^R_min - 1). Zero when R_min = 0.
double rate_residual_penalty(const CMatrix& H, const BeamMatrix& W,
                             const ScenarioConfig& config);
BeamMatrix rate_residual_penalty_gradient(const CMatrix& H,
                                          const BeamMatrix& W,
                                          const ScenarioConfig& config);
/// Largest normalized rate residual (positive means violated).
double max_rate_residual(const CMatrix& H, const BeamMatrix& W,
                         const ScenarioConfig& config);

/// Rescale every row with squared norm above P_max onto the boundary.
BeamMatrix project_row_power(const BeamMatrix& W, double P_max);

/// Per-user matched filter (unit-norm columns along h_k), scaled so the
/// loudest AP transmits exactly P_max.
BeamMatrix matched_filter(const CMatrix& H, double P_max);

/// Rotate each column so that h^H_k w_k is real and non-negative.
BeamMatrix align_column_phases(const CMatrix& H, const BeamMatrix& W);

/// Smallest common scale c >= 1 that meets every rate target while keeping
/// the per-AP budget. Returns W unchanged when already rate-feasible or when
/// no admissible scale exists.
BeamMatrix restore_rate_feasibility(const CMatrix& H, const BeamMatrix& W,
                                    const ScenarioConfig& config);

struct BeamSubproblemResult {
  BeamMatrix W;
  double objective = 0.0;  // f1 - mu * penalty at the final weight
  double penalty_weight = 0.0;
  int iterations = 0;
  bool stalled = false;
};

/// Projected-gradient ascent on f1 - mu * rate_residual_penalty with
/// backtracking and per-AP power projection. mu starts at
/// opts.penalty_weight and grows geometrically while the residual exceeds
/// opts.violation_tolerance. Never returns a point worse than W_init under
/// the final weight.
BeamSubproblemResult solve_beam_subproblem(const CMatrix& H,
                                           const BeamMatrix& W_init,
                                           const CVector& y, double z,
                                           const ScenarioConfig& config,
                                           const BeamSolverOptions& opts);

struct BeamTraceRow {
  int iteration = 0;
  double f1 = 0.0;
  double ee = 0.0;
  double max_violation = 0.0;
};

struct BeamOptResult {
  BeamMatrix W;
  std::vector<BeamTraceRow> trace;
  bool stalled = false;
};

/// Alternate auxiliary refresh and the subproblem solve until the EE gain
/// drops below opts.ee_tolerance. Returns the best-EE iterate.
BeamOptResult optimize_beamforming(const ChannelSet& channels,
                                   const PhaseVector& v,
                                   const BeamMatrix& W_init,
                                   const ScenarioConfig& config,
                                   const BeamSolverOptions& opts = {});

std::string beam_trace_csv(const std::vector<BeamTraceRow>& trace);

}  // namespace irsee
