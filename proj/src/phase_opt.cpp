#include "irsee/phase_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "irsee/random.hpp"

namespace irsee {

CMatrix CascadedCoefficients::received(const PhaseVector& v) const {
  CMatrix s = b;
  if (I > 0) {
    const CVector p = v.entries();
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < K; ++j) s(k, j) += p.cwiseProduct(at(k, j)).sum();
    }
  }
  return s;
}

CascadedCoefficients build_coefficients(const ChannelSet& channels,
                                        const BeamMatrix& W) {
  CascadedCoefficients c;
  c.K = channels.K;
  c.I = channels.I();
  c.a.reserve(static_cast<std::size_t>(c.K) * c.K);
  for (int k = 0; k < c.K; ++k) {
    for (int j = 0; j < c.K; ++j) {
      c.a.push_back(c.I > 0 ? CVector(channels.g_aiu[k] * W.col(j))
                            : CVector(0));
    }
  }
  c.b = channels.g_au * W;
  return c;
}

RVector update_gamma(const PhaseVector& v, const CascadedCoefficients& coeffs,
                     double sigma2) {
  const CMatrix s = coeffs.received(v);
  RVector gamma(coeffs.K);
  for (int k = 0; k < coeffs.K; ++k) {
    const double signal = std::norm(s(k, k));
    gamma(k) = signal / (s.row(k).squaredNorm() - signal + sigma2);
  }
  return gamma;
}

CVector update_epsilon(const PhaseVector& v, const RVector& gamma,
                       const CascadedCoefficients& coeffs, double sigma2) {
  const CMatrix s = coeffs.received(v);
  CVector eps(coeffs.K);
  for (int k = 0; k < coeffs.K; ++k) {
    eps(k) = std::sqrt(1.0 + gamma(k)) * s(k, k) /
             (s.row(k).squaredNorm() + sigma2);
  }
  return eps;
}

QuadraticForm build_quadratic_form(const RVector& gamma, const CVector& epsilon,
                                   const CascadedCoefficients& coeffs) {
  QuadraticForm f;
  f.Theta = CMatrix::Zero(coeffs.I, coeffs.I);
  f.u = CVector::Zero(coeffs.I);
  for (int k = 0; k < coeffs.K; ++k) {
    const double e2 = std::norm(epsilon(k));
    f.u += std::sqrt(1.0 + gamma(k)) * std::conj(epsilon(k)) * coeffs.at(k, k);
    for (int j = 0; j < coeffs.K; ++j) {
      const CVector& a = coeffs.at(k, j);
      f.Theta += e2 * a * a.adjoint();
      f.u -= e2 * std::conj(coeffs.b(k, j)) * a;
    }
  }
  // Clean rounding so Theta is Hermitian to the last bit.
  f.Theta = 0.5 * (f.Theta + f.Theta.adjoint()).eval();
  return f;
}

double quadratic_part(const PhaseVector& v, const CMatrix& Theta,
                      const CVector& u) {
  if (v.size() == 0) return 0.0;
  const CVector vv = v.v();
  const double quad = vv.dot(Theta * vv).real();  // v^H Theta v
  const double lin = vv.dot(u).real();            // Re{v^H u}
  return -quad + 2.0 * lin;
}

double f2_constant(const RVector& gamma, const CVector& epsilon,
                   const CascadedCoefficients& coeffs, double sigma2) {
  double c = 0.0;
  for (int k = 0; k < coeffs.K; ++k) {
    c += 2.0 * std::sqrt(1.0 + gamma(k)) *
             (std::conj(epsilon(k)) * coeffs.b(k, k)).real() -
         std::norm(epsilon(k)) * (coeffs.b.row(k).squaredNorm() + sigma2);
  }
  return c;
}

double eval_f2(const PhaseVector& v, const RVector& gamma,
               const CVector& epsilon, const QuadraticForm& form,
               bool with_constant, const CascadedCoefficients& coeffs,
               double sigma2) {
  double value = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    value += std::log2(1.0 + gamma(k)) - gamma(k);
  }
  value += quadratic_part(v, form.Theta, form.u);
  if (with_constant) value += f2_constant(gamma, epsilon, coeffs, sigma2);
  return value;
}

PhaseVector bcd_phase_update(const PhaseVector& v, const CMatrix& Theta,
                             const CVector& u, int passes) {
  PhaseVector out = v;
  const int n = v.size();
  CVector p = out.entries();
  for (int pass = 0; pass < passes; ++pass) {
    for (int i = 0; i < n; ++i) {
      cd c = u(i);
      for (int j = 0; j < n; ++j) {
        if (j != i) c -= Theta(i, j) * std::conj(p(j));
      }
      if (c == cd(0.0, 0.0)) continue;
      out.set_angle(i, -std::arg(c));
      p(i) = std::polar(1.0, out.theta()(i));
    }
  }
  return out;
}

CVector lift(const PhaseVector& v) {
  CVector q(v.size() + 1);
  q.head(v.size()) = v.v();
  q(v.size()) = 1.0;
  return q;
}

double SDRProblem::objective(const CMatrix& Q) const {
  return (theta_bar.cwiseProduct(Q.transpose())).sum().real();
}

SDRProblem build_sdr(const QuadraticForm& form,
                     const CascadedCoefficients& coeffs, double sigma2,
                     double R_min) {
  SDRProblem p;
  p.K = coeffs.K;
  p.I = coeffs.I;
  p.sigma2 = sigma2;
  p.R_min = R_min;
  const int n = coeffs.I + 1;
  p.theta_bar = CMatrix::Zero(n, n);
  p.theta_bar.topLeftCorner(coeffs.I, coeffs.I) = -form.Theta;
  p.theta_bar.topRightCorner(coeffs.I, 1) = form.u;
  p.theta_bar.bottomLeftCorner(1, coeffs.I) = form.u.adjoint();
  p.b_abs2 = coeffs.b.cwiseAbs2();
  for (int k = 0; k < coeffs.K; ++k) {
    for (int j = 0; j < coeffs.K; ++j) {
      const CVector& a = coeffs.at(k, j);
      const cd b = coeffs.b(k, j);
      CMatrix C = CMatrix::Zero(n, n);
      C.topLeftCorner(coeffs.I, coeffs.I) = a * a.adjoint();
      C.topRightCorner(coeffs.I, 1) = a * std::conj(b);
      C.bottomLeftCorner(1, coeffs.I) = b * a.adjoint();
      p.C.push_back(std::move(C));
    }
  }
  return p;
}

namespace {

double frob_inner(const CMatrix& A, const CMatrix& B) {
  return (A.conjugate().cwiseProduct(B)).sum().real();
}

CMatrix hermitian_part(const CMatrix& A) {
  return 0.5 * (A + A.adjoint());
}

CMatrix project_psd(const CMatrix& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(A));
  const RVector lambda = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
}

// Half-space <D, X> <= e restricted to the off-diagonal part of X (the
// diagonal is pinned to one, so its contribution is folded into e).
struct OffDiagHalfspace {
  CMatrix D;
  double e = 0.0;
};

struct AffineSet {
  std::vector<OffDiagHalfspace> halfspaces;
  Eigen::MatrixXd gram;
  bool infeasible = false;

  // Frobenius projection of a Hermitian matrix onto {diag = 1} intersected
  // with the half-spaces. The dual is a small non-negative QP solved by
  // cyclic coordinate ascent on the multipliers.
  CMatrix project(const CMatrix& M, RVector& lambda) const {
    CMatrix Y = hermitian_part(M);
    Y.diagonal().setOnes();
    const int m = static_cast<int>(halfspaces.size());
    if (m == 0) return Y;
    RVector c(m);
    for (int k = 0; k < m; ++k) {
      c(k) = frob_inner(halfspaces[k].D, Y) - halfspaces[k].e;
    }
    if (lambda.size() != m) lambda = RVector::Zero(m);
    for (int sweep = 0; sweep < 500; ++sweep) {
      double moved = 0.0;
      for (int k = 0; k < m; ++k) {
        if (gram(k, k) <= 0.0) continue;
        // residual of constraint k at Y - sum lambda D
        const double r = c(k) - gram.row(k).dot(lambda);
        const double next = std::max(0.0, lambda(k) + r / gram(k, k));
        moved = std::max(moved, std::abs(next - lambda(k)));
        lambda(k) = next;
      }
      if (moved <= 1e-15 * (1.0 + lambda.lpNorm<Eigen::Infinity>())) break;
    }
    for (int k = 0; k < m; ++k) Y -= lambda(k) * halfspaces[k].D;
    Y.diagonal().setOnes();
    return Y;
  }
};

AffineSet make_affine_set(const SDRProblem& problem, bool enforce) {
  AffineSet set;
  const double tau2 = std::exp2(problem.R_min) - 1.0;
  if (!enforce || tau2 <= 0.0 || problem.K == 0) return set;
  const int n = problem.I + 1;
  for (int k = 0; k < problem.K; ++k) {
    CMatrix D = CMatrix::Zero(n, n);
    double e = problem.b_abs2(k, k) / tau2 - problem.sigma2;
    for (int j = 0; j < problem.K; ++j) {
      if (j == k) {
        D -= problem.c_at(k, j) / tau2;
      } else {
        D += problem.c_at(k, j);
        e -= problem.b_abs2(k, j);
      }
    }
    e -= D.diagonal().real().sum();
    D.diagonal().setZero();
    const double scale = D.norm();
    if (scale > 0.0) {
      set.halfspaces.push_back({D / scale, e / scale});
    } else if (e < 0.0) {
      set.infeasible = true;
    }
  }
  const int m = static_cast<int>(set.halfspaces.size());
  set.gram.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      set.gram(i, j) = frob_inner(set.halfspaces[i].D, set.halfspaces[j].D);
    }
  }
  return set;
}

SDRResult run_admm(const SDRProblem& problem, const AffineSet& set,
                   const SDROptions& opts) {
  const int n = problem.I + 1;
  SDRResult out;
  const double obj_scale = problem.theta_bar.norm();
  const CMatrix cost = obj_scale > 0.0
                           ? CMatrix(-problem.theta_bar / obj_scale)
                           : CMatrix(CMatrix::Zero(n, n));
  double rho = opts.rho;
  CMatrix Z = CMatrix::Identity(n, n);
  CMatrix U = CMatrix::Zero(n, n);
  CMatrix X = Z;
  RVector lambda;
  const double tol = opts.tolerance * n;
  for (int it = 0; it < opts.max_iterations; ++it) {
    X = set.project(Z - U - cost / rho, lambda);
    const CMatrix Z_prev = Z;
    Z = project_psd(X + U);
    U += X - Z;
    out.iterations = it + 1;
    const double primal = (X - Z).norm();
    const double dual = rho * (Z - Z_prev).norm();
    if (lambda.size() > 0 && lambda.maxCoeff() > 1e12) break;
    if (primal <= tol && dual <= tol) {
      out.converged = true;
      break;
    }
    if (primal > 10.0 * dual) {
      rho *= 2.0;
      U /= 2.0;
    } else if (dual > 10.0 * primal) {
      rho /= 2.0;
      U *= 2.0;
    }
  }
  // Rescale to an exactly unit diagonal; congruence keeps Z PSD.
  Z = hermitian_part(Z);
  RVector d = Z.diagonal().real();
  for (int i = 0; i < n; ++i) d(i) = d(i) > 0.0 ? 1.0 / std::sqrt(d(i)) : 0.0;
  CMatrix Q = d.asDiagonal() * Z * d.asDiagonal();
  for (int i = 0; i < n; ++i) {
    if (d(i) == 0.0) Q(i, i) = 1.0;
  }
  out.Q = hermitian_part(Q);
  out.objective = problem.objective(out.Q);
  return out;
}

double max_rate_violation(const SDRProblem& problem, const AffineSet& set,
                          const CMatrix& Q) {
  double worst = 0.0;
  for (const auto& h : set.halfspaces) {
    worst = std::max(worst, frob_inner(h.D, Q) - h.e);
  }
  (void)problem;
  return worst;
}

}  // namespace

SDRResult solve_sdr(const SDRProblem& problem, const SDROptions& opts) {
  if (problem.I + 1 < 2) {
    throw std::invalid_argument("solve_sdr: lifted dimension must be >= 2");
  }
  AffineSet set = make_affine_set(problem, opts.enforce_rate_constraints);
  if (!set.infeasible) {
    SDRResult r = run_admm(problem, set, opts);
    if (set.halfspaces.empty() ||
        max_rate_violation(problem, set, r.Q) <= 1e-6) {
      return r;
    }
  }
  SDRResult r = run_admm(problem, AffineSet{}, opts);
  r.rate_constraints_dropped = true;
  return r;
}

PhaseVector gaussian_randomization(const CMatrix& Q, const SDRProblem& problem,
                                   int num_candidates, std::uint64_t seed,
                                   const PhaseEvaluator& evaluator) {
  if (num_candidates < 1) {
    throw std::invalid_argument("gaussian_randomization: need >= 1 candidate");
  }
  const int n = static_cast<int>(Q.rows());
  const int I = n - 1;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(Q));
  const CMatrix S =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  const CMatrix Theta = -problem.theta_bar.topLeftCorner(I, I);
  const CVector u = problem.theta_bar.topRightCorner(I, 1);
  auto score = [&](const PhaseVector& v) {
    return evaluator ? evaluator(v) : quadratic_part(v, Theta, u);
  };

  Rng rng(seed);
  PhaseVector best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < num_candidates; ++c) {
    CVector q;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      CVector r(n);
      for (int i = 0; i < n; ++i) r(i) = complex_gaussian(rng);
      q = S * r;
      if (std::abs(q(I)) > 0.0) break;
    }
    if (!(std::abs(q(I)) > 0.0)) continue;
    // q approximates [conj(p); 1] up to a common phase.
    RVector theta(I);
    for (int i = 0; i < I; ++i) theta(i) = -std::arg(q(i) / q(I));
    PhaseVector v(theta);
    const double s = score(v);
    if (s > best_score || best.size() == 0) {
      best_score = s;
      best = std::move(v);
    }
  }
  if (best.size() != I) best = PhaseVector::zeros(I);
  return best;
}

PhaseBackend parse_phase_backend(const std::string& name) {
  if (name == "bcd") return PhaseBackend::kBcd;
  if (name == "sdr") return PhaseBackend::kSdr;
  throw std::invalid_argument("unknown phase backend '" + name +
                              "' (expected bcd or sdr)");
}

std::string to_string(PhaseBackend backend) {
  return backend == PhaseBackend::kBcd ? "bcd" : "sdr";
}

PhaseOptResult optimize_phases(const ChannelSet& channels, const BeamMatrix& W,
                               const PhaseVector& v_init,
                               const ScenarioConfig& config,
                               const PhaseOptions& opts) {
  PhaseOptResult out;
  out.v = v_init;
  if (channels.I() == 0) return out;

  const CascadedCoefficients coeffs = build_coefficients(channels, W);
  const double power = total_power(W, config);
  auto sum_rate = [&](const PhaseVector& v) {
    return user_rates(channels, v, W, config.sigma2).sum();
  };
  auto rates_met = [&](const PhaseVector& v) {
    return (user_rates(channels, v, W, config.sigma2).array() - config.R_min)
               .minCoeff() >= -kFeasibilityTolerance;
  };
  auto record = [&](int iteration, const PhaseVector& v, double f2_bare,
                    double rate) {
    PhaseTraceRow row;
    row.iteration = iteration;
    row.f2_bare = f2_bare;
    row.sum_rate = rate;
    row.ee = config.B * rate / power;
    row.modulus_deviation = modulus_deviation(v.entries());
    out.trace.push_back(row);
  };

  double best_rate = sum_rate(out.v);
  {
    const RVector gamma = update_gamma(out.v, coeffs, config.sigma2);
    const CVector eps = update_epsilon(out.v, gamma, coeffs, config.sigma2);
    const QuadraticForm form = build_quadratic_form(gamma, eps, coeffs);
    record(0, out.v, eval_f2(out.v, gamma, eps, form, false, coeffs, config.sigma2),
           best_rate);
  }

  for (int it = 1; it <= opts.max_iterations; ++it) {
    const RVector gamma = update_gamma(out.v, coeffs, config.sigma2);
    const CVector eps = update_epsilon(out.v, gamma, coeffs, config.sigma2);
    const QuadraticForm form = build_quadratic_form(gamma, eps, coeffs);

    PhaseVector candidate;
    if (opts.backend == PhaseBackend::kBcd) {
      candidate = bcd_phase_update(out.v, form.Theta, form.u, opts.bcd_passes);
    } else {
      const SDRProblem problem =
          build_sdr(form, coeffs, config.sigma2, config.R_min);
      const SDRResult sdr = solve_sdr(problem, opts.sdr);
      if (!sdr.converged) out.flags.push_back("sdr_not_converged");
      if (sdr.rate_constraints_dropped) out.flags.push_back("sdr_rate_dropped");
      candidate = gaussian_randomization(sdr.Q, problem, opts.candidates,
                                         derive_seed(opts.seed, it), sum_rate);
    }

    const double rate = sum_rate(candidate);
    if (!(rate > best_rate)) break;
    // Rate targets are checked after the update: a feasible incumbent is
    // never traded for a point that misses them.
    if (rates_met(out.v) && !rates_met(candidate)) {
      out.flags.push_back("rate_constraint_blocked");
      break;
    }
    const double gain = (rate - best_rate) / std::max(best_rate, 1e-300);
    out.v = candidate;
    best_rate = rate;
    record(it, out.v,
           eval_f2(out.v, gamma, eps, form, false, coeffs, config.sigma2), rate);
    if (gain < opts.ee_tolerance) break;
  }
  std::sort(out.flags.begin(), out.flags.end());
  out.flags.erase(std::unique(out.flags.begin(), out.flags.end()),
                  out.flags.end());
  return out;
}

std::string phase_trace_csv(const std::vector<PhaseTraceRow>& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "iteration,f2_bare,sum_rate,ee,max_modulus_deviation\n";
  for (const auto& r : trace) {
    os << r.iteration << ',' << r.f2_bare << ',' << r.sum_rate << ',' << r.ee
       << ',' << r.modulus_deviation << '\n';
  }
  return os.str();
}

}  // namespace irsee
