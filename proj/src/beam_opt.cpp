#include "irsee/beam_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace irsee {

namespace {

constexpr double kInvLn2 = 1.4426950408889634;

double real_inner(const BeamMatrix& a, const BeamMatrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}

// Small relative margin so that a residual within the solver tolerance
// still meets the rate target exactly.
constexpr double kRateMargin = 1e-6;

double rate_threshold(const ScenarioConfig& config) {
  return (1.0 + kRateMargin) *
         std::sqrt(std::max(0.0, std::exp2(config.R_min) - 1.0));
}

double sum_rate(const CMatrix& H, const BeamMatrix& W, double sigma2) {
  return rates_from_channel(H, W, sigma2).sum();
}

// Power is always within budget after projection, so only rates matter.
bool rates_met(const CMatrix& H, const BeamMatrix& W,
               const ScenarioConfig& config) {
  return (rates_from_channel(H, W, config.sigma2).array() - config.R_min)
             .minCoeff() >= -kFeasibilityTolerance;
}

double efficiency(const CMatrix& H, const BeamMatrix& W,
                  const ScenarioConfig& config) {
  return config.B * sum_rate(H, W, config.sigma2) / total_power(W, config);
}

}  // namespace

CVector update_y(const CMatrix& H, const BeamMatrix& W, double sigma2) {
  const CMatrix HW = H * W;
  CVector y(HW.rows());
  for (Eigen::Index k = 0; k < HW.rows(); ++k) {
    const double interference = HW.row(k).squaredNorm() - std::norm(HW(k, k));
    y(k) = HW(k, k) / (interference + sigma2);
  }
  return y;
}

double update_z(const CMatrix& H, const BeamMatrix& W,
                const ScenarioConfig& config) {
  return std::sqrt(sum_rate(H, W, config.sigma2)) / total_power(W, config);
}

std::optional<double> eval_f1(const CMatrix& H, const BeamMatrix& W,
                              const CVector& y, double z,
                              const ScenarioConfig& config) {
  const CMatrix HW = H * W;
  double s = 0.0;
  for (Eigen::Index k = 0; k < HW.rows(); ++k) {
    const double interference = HW.row(k).squaredNorm() - std::norm(HW(k, k));
    const double arg = 1.0 + 2.0 * (std::conj(y(k)) * HW(k, k)).real() -
                       std::norm(y(k)) * (interference + config.sigma2);
    if (!(arg > 0.0)) return std::nullopt;
    s += std::log2(arg);
  }
  return -z * z * total_power(W, config) + 2.0 * z * std::sqrt(std::max(s, 0.0));
}

BeamMatrix f1_gradient(const CMatrix& H, const BeamMatrix& W, const CVector& y,
                       double z, const ScenarioConfig& config) {
  const Eigen::Index K = H.rows();
  const CMatrix HW = H * W;
  RVector inv_arg(K);
  double s = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const double interference = HW.row(k).squaredNorm() - std::norm(HW(k, k));
    const double arg = 1.0 + 2.0 * (std::conj(y(k)) * HW(k, k)).real() -
                       std::norm(y(k)) * (interference + config.sigma2);
    inv_arg(k) = arg > 0.0 ? kInvLn2 / arg : 0.0;
    s += arg > 0.0 ? std::log2(arg) : 0.0;
  }

  BeamMatrix grad = -2.0 * config.alpha() * z * z * W;
  if (s <= 0.0) return grad;

  BeamMatrix ds = BeamMatrix::Zero(W.rows(), W.cols());
  for (Eigen::Index i = 0; i < K; ++i) {
    const CVector c = H.row(i).adjoint();
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j == i) {
        ds.col(j) += inv_arg(i) * 2.0 * y(i) * c;
      } else {
        ds.col(j) -= inv_arg(i) * 2.0 * std::norm(y(i)) * HW(i, j) * c;
      }
    }
  }
  grad += (z / std::sqrt(s)) * ds;
  return grad;
}

double max_rate_residual(const CMatrix& H, const BeamMatrix& W,
                         const ScenarioConfig& config) {
  const double tau = rate_threshold(config);
  if (tau <= 0.0) return -std::numeric_limits<double>::infinity();
  const CMatrix HW = H * W;
  const double sigma = std::sqrt(config.sigma2);
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < HW.rows(); ++k) {
    const double interference = HW.row(k).squaredNorm() - std::norm(HW(k, k));
    const double r =
        (std::sqrt(interference + config.sigma2) - HW(k, k).real() / tau) / sigma;
    worst = std::max(worst, r);
  }
  return worst;
}

double rate_residual_penalty(const CMatrix& H, const BeamMatrix& W,
                             const ScenarioConfig& config) {
  const double tau = rate_threshold(config);
  if (tau <= 0.0) return 0.0;
  const CMatrix HW = H * W;
  const double sigma = std::sqrt(config.sigma2);
  double total = 0.0;
  for (Eigen::Index k = 0; k < HW.rows(); ++k) {
    const double interference = HW.row(k).squaredNorm() - std::norm(HW(k, k));
    const double r =
        (std::sqrt(interference + config.sigma2) - HW(k, k).real() / tau) / sigma;
    if (r > 0.0) total += r * r;
  }
  return total;
}

BeamMatrix rate_residual_penalty_gradient(const CMatrix& H,
                                          const BeamMatrix& W,
                                          const ScenarioConfig& config) {
  BeamMatrix grad = BeamMatrix::Zero(W.rows(), W.cols());
  const double tau = rate_threshold(config);
  if (tau <= 0.0) return grad;
  const CMatrix HW = H * W;
  const double sigma = std::sqrt(config.sigma2);
  for (Eigen::Index k = 0; k < HW.rows(); ++k) {
    const double interference = HW.row(k).squaredNorm() - std::norm(HW(k, k));
    const double root = std::sqrt(interference + config.sigma2);
    const double r = (root - HW(k, k).real() / tau) / sigma;
    if (r <= 0.0) continue;
    const CVector c = H.row(k).adjoint();
    for (Eigen::Index j = 0; j < HW.cols(); ++j) {
      if (j == k) {
        grad.col(j) -= (2.0 * r / (sigma * tau)) * c;
      } else {
        grad.col(j) += (2.0 * r / (sigma * root)) * HW(k, j) * c;
      }
    }
  }
  return grad;
}

BeamMatrix project_row_power(const BeamMatrix& W, double P_max) {
  BeamMatrix out = W;
  for (Eigen::Index m = 0; m < W.rows(); ++m) {
    const double norm2 = W.row(m).squaredNorm();
    if (norm2 > P_max) out.row(m) *= std::sqrt(P_max) / std::sqrt(norm2);
  }
  return out;
}

BeamMatrix matched_filter(const CMatrix& H, double P_max) {
  BeamMatrix W = H.adjoint();
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    const double n = W.col(k).norm();
    if (n > 0.0) {
      W.col(k) /= n;
    } else {
      W.col(k).setConstant(cd(1.0 / std::sqrt(double(W.rows())), 0.0));
    }
  }
  const double loudest = W.rowwise().squaredNorm().maxCoeff();
  return W * std::sqrt(P_max / loudest);
}

BeamMatrix align_column_phases(const CMatrix& H, const BeamMatrix& W) {
  BeamMatrix out = W;
  const CMatrix HW = H * W;
  for (Eigen::Index k = 0; k < W.cols(); ++k) {
    const double a = std::abs(HW(k, k));
    if (a > 0.0) out.col(k) *= std::conj(HW(k, k)) / a;
  }
  return out;
}

BeamMatrix restore_rate_feasibility(const CMatrix& H, const BeamMatrix& W,
                                    const ScenarioConfig& config) {
  auto slack = [&](const BeamMatrix& X) {
    return (rates_from_channel(H, X, config.sigma2).array() - config.R_min)
        .minCoeff();
  };
  if (slack(W) >= 0.0) return W;
  const double loudest = W.rowwise().squaredNorm().maxCoeff();
  if (loudest <= 0.0) return W;
  const double c_max = std::sqrt(config.P_max / loudest);
  if (c_max <= 1.0 || slack(W * c_max) < 0.0) return W;
  double lo = 1.0, hi = c_max;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (slack(W * mid) >= 0.0 ? hi : lo) = mid;
  }
  return W * hi;
}

BeamSubproblemResult solve_beam_subproblem(const CMatrix& H,
                                           const BeamMatrix& W_init,
                                           const CVector& y, double z,
                                           const ScenarioConfig& config,
                                           const BeamSolverOptions& opts) {
  BeamSubproblemResult out;
  const BeamMatrix start = project_row_power(W_init, config.P_max);
  BeamMatrix W = start;
  double mu = opts.penalty_weight;
  const bool has_rate_constraint = rate_threshold(config) > 0.0;

  auto objective = [&](const BeamMatrix& X) -> std::optional<double> {
    const auto f = eval_f1(H, X, y, z, config);
    if (!f) return std::nullopt;
    return *f - mu * rate_residual_penalty(H, X, config);
  };
  auto gradient = [&](const BeamMatrix& X) {
    return BeamMatrix(f1_gradient(H, X, y, z, config) -
                      mu * rate_residual_penalty_gradient(H, X, config));
  };

  double step = 0.0;
  while (true) {
    auto current = objective(W);
    if (!current) break;  // y inconsistent with W; nothing to do safely
    BeamMatrix g = gradient(W);
    if (step <= 0.0) {
      const double gn = g.norm();
      const double scale = std::max(W.norm(), std::sqrt(config.P_max));
      step = gn > 0.0 ? 0.1 * scale / gn : 1.0;
    }
    for (int it = 0; it < opts.max_iterations; ++it) {
      bool accepted = false;
      bool converged = false;
      BeamMatrix next;
      double next_value = *current;
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        next = project_row_power(W + step * g, config.P_max);
        const BeamMatrix d = next - W;
        if (d.norm() <= 1e-14 * (1.0 + W.norm())) {
          converged = true;
          break;
        }
        const auto value = objective(next);
        if (value && *value >= *current + opts.armijo * real_inner(g, d)) {
          accepted = true;
          next_value = *value;
          break;
        }
        step *= opts.backtrack;
      }
      ++out.iterations;
      if (converged) break;
      if (!accepted) {
        out.stalled = true;
        break;
      }
      const BeamMatrix g_next = gradient(next);
      const BeamMatrix dW = next - W;
      const BeamMatrix dg = g_next - g;
      const double curvature = std::abs(real_inner(dW, dg));
      const double bb = curvature > 0.0 ? dW.squaredNorm() / curvature : 0.0;
      step = (std::isfinite(bb) && bb > 0.0) ? bb : 2.0 * step;

      const double change =
          (next_value - *current) / std::max(std::abs(next_value), 1e-300);
      W = next;
      g = g_next;
      current = next_value;
      if (change <= opts.tolerance) break;
    }
    if (!has_rate_constraint || mu >= opts.penalty_cap ||
        max_rate_residual(H, W, config) <= opts.violation_tolerance) {
      break;
    }
    mu = std::min(mu * opts.penalty_growth, opts.penalty_cap);
  }

  out.penalty_weight = mu;
  const auto final_value = objective(W);
  const auto start_value = objective(start);
  if (!final_value || (start_value && *final_value < *start_value)) {
    W = start;
  }
  out.W = W;
  out.objective = objective(W).value_or(
      -std::numeric_limits<double>::infinity());
  return out;
}

BeamOptResult optimize_beamforming(const ChannelSet& channels,
                                   const PhaseVector& v,
                                   const BeamMatrix& W_init,
                                   const ScenarioConfig& config,
                                   const BeamSolverOptions& opts) {
  const CMatrix H = aggregate_channels(channels, v);
  BeamOptResult out;
  BeamMatrix best = project_row_power(W_init, config.P_max);
  double best_ee = efficiency(H, best, config);
  bool best_ok = rates_met(H, best, config);

  auto record = [&](int iteration, const BeamMatrix& X) {
    BeamTraceRow row;
    row.iteration = iteration;
    row.f1 = sum_rate(H, X, config.sigma2) / total_power(X, config);
    row.ee = efficiency(H, X, config);
    const double residual = max_rate_residual(H, X, config);
    const double power_excess =
        (X.rowwise().squaredNorm().array() - config.P_max).maxCoeff();
    row.max_violation = std::max({0.0, residual, power_excess});
    out.trace.push_back(row);
  };
  record(0, best);

  for (int pass = 1; pass <= opts.max_passes; ++pass) {
    const BeamMatrix start = align_column_phases(H, best);
    const CVector y = update_y(H, start, config.sigma2);
    const double z = update_z(H, start, config);
    const BeamSubproblemResult sub =
        solve_beam_subproblem(H, start, y, z, config, opts);
    out.stalled = out.stalled || sub.stalled;
    const BeamMatrix candidate = restore_rate_feasibility(H, sub.W, config);
    const double ee = efficiency(H, candidate, config);
    const bool ok = rates_met(H, candidate, config);
    if (!ranks_above(ee, ok, best_ee, best_ok)) break;
    const bool became_feasible = ok && !best_ok;
    const double gain = (ee - best_ee) / std::max(best_ee, 1e-300);
    best = candidate;
    best_ee = ee;
    best_ok = ok;
    record(pass, best);
    if (!became_feasible && gain < opts.ee_tolerance) break;
  }
  out.W = best;
  return out;
}

std::string beam_trace_csv(const std::vector<BeamTraceRow>& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,f1,ee,max_violation\n";
  for (const auto& r : trace) {
    os << r.iteration << ',' << r.f1 << ',' << r.ee << ',' << r.max_violation
       << '\n';
  }
  return os.str();
}

}  // namespace irsee
