#include <cmath>

#include <gtest/gtest.h>

#include "irsee/beam_opt.hpp"
#include "irsee/channel.hpp"
#include "irsee/random.hpp"
#include "oracles.hpp"

namespace irsee {
namespace {

ScenarioConfig UnitConfig() {
  ScenarioConfig c;
  c.M = c.K = c.L = c.N = 1;
  c.upsilon = 1.0;
  c.sigma2 = 1.0;
  c.P_AP = 1.0;
  c.P_User = c.P_IRS = 0.0;
  c.R_min = 0.0;
  c.ap_positions = {{0, 0, 0}};
  c.irs_positions = {{0, 0, 0}};
  return c;
}

BeamMatrix RandomBeam(int M, int K, double P_max, Rng& rng) {
  BeamMatrix W(M, K);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) W(m, k) = complex_gaussian(rng);
  return project_row_power(W, P_max);
}

struct Instance {
  ScenarioConfig config = ScenarioConfig::desk();
  CMatrix H;
  BeamMatrix W;
};

Instance DeskInstance(std::uint64_t seed) {
  Instance in;
  const ChannelSet ch = sample_scenario(in.config, seed);
  Rng rng(seed);
  in.H = aggregate_channels(ch, random_phases(ch.I(), rng));
  in.W = RandomBeam(in.config.M, in.config.K, in.config.P_max, rng);
  return in;
}

TEST(UpdateY, ScalarAndZeroColumn) {
  const CMatrix H = CMatrix::Constant(1, 1, 1.0);
  EXPECT_NEAR(std::abs(update_y(H, BeamMatrix::Constant(1, 1, 2.0), 1.0)(0) - 2.0), 0, 1e-15);
  Instance in = DeskInstance(1);
  in.W.col(1).setZero();
  EXPECT_EQ(update_y(in.H, in.W, in.config.sigma2)(1), cd(0.0));
}

TEST(UpdateY, MatchesFormula) {
  Rng rng(3);
  CMatrix H(3, 4);
  for (int i = 0; i < H.size(); ++i) H(i) = complex_gaussian(rng);
  const BeamMatrix W = RandomBeam(4, 3, 1.0, rng);
  const CVector y = update_y(H, W, 0.3);
  const CMatrix r = oracle::received(H, W);
  for (int k = 0; k < 3; ++k) {
    double interference = 0.3;
    for (int j = 0; j < 3; ++j)
      if (j != k) interference += std::norm(r(k, j));
    EXPECT_NEAR(std::abs(y(k) - r(k, k) / interference), 0.0, 1e-12 * std::abs(y(k)));
  }
}

TEST(UpdateZ, ClosedForm) {
  const ScenarioConfig c = UnitConfig();
  const CMatrix H = CMatrix::Constant(1, 1, 1.0);
  EXPECT_NEAR(update_z(H, BeamMatrix::Constant(1, 1, 2.0), c),
              std::sqrt(std::log2(5.0)) / 5.0, 1e-15);
  EXPECT_NEAR(std::sqrt(std::log2(5.0)) / 5.0, 0.30476, 1e-5);
  EXPECT_EQ(update_z(H, BeamMatrix::Zero(1, 1), c), 0.0);
}

TEST(UpdateZ, MatchesIndependentEvaluation) {
  const Instance in = DeskInstance(4);
  const double expected = std::sqrt(oracle::sum_rate(in.H, in.W, in.config.sigma2)) /
                          oracle::power(in.W, in.config);
  EXPECT_NEAR(update_z(in.H, in.W, in.config), expected, 1e-12 * expected);
}

TEST(EvalF1, TightAtOptimalAuxiliaries) {
  const ScenarioConfig c = UnitConfig();
  const CMatrix H = CMatrix::Constant(1, 1, 1.0);
  const BeamMatrix W = BeamMatrix::Constant(1, 1, 2.0);
  const auto f1 = eval_f1(H, W, update_y(H, W, 1.0), update_z(H, W, c), c);
  ASSERT_TRUE(f1.has_value());
  EXPECT_NEAR(*f1, std::log2(5.0) / 5.0, 1e-15);
  EXPECT_NEAR(*f1, 0.46439, 1e-5);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const Instance in = DeskInstance(100 + s);
    const auto value = eval_f1(in.H, in.W, update_y(in.H, in.W, in.config.sigma2),
                               update_z(in.H, in.W, in.config), in.config);
    ASSERT_TRUE(value.has_value());
    const double expected = oracle::sum_rate(in.H, in.W, in.config.sigma2) /
                            oracle::power(in.W, in.config);
    EXPECT_NEAR(*value, expected, 1e-9 * expected);
  }
}

TEST(EvalF1, DegenerateAuxiliaries) {
  const Instance in = DeskInstance(5);
  const CVector y = update_y(in.H, in.W, in.config.sigma2);
  EXPECT_EQ(*eval_f1(in.H, in.W, y, 0.0, in.config), 0.0);
  const double z = 0.7;
  const double power = oracle::power(in.W, in.config);
  EXPECT_NEAR(*eval_f1(in.H, in.W, CVector::Zero(in.config.K), z, in.config),
              -z * z * power, 1e-12);
}

TEST(EvalF1, AuxiliariesAreMaximizers) {
  const Instance in = DeskInstance(6);
  const CVector y = update_y(in.H, in.W, in.config.sigma2);
  const double z = update_z(in.H, in.W, in.config);
  const double best = *eval_f1(in.H, in.W, y, z, in.config);
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    CVector dy(y.size());
    for (int k = 0; k < y.size(); ++k) dy(k) = 0.05 * std::abs(y(k)) * complex_gaussian(rng);
    const auto value = eval_f1(in.H, in.W, y + dy, z, in.config);
    if (value) EXPECT_LE(*value, best + 1e-12 * std::abs(best));
    const double dz = z * (uniform01(rng) - 0.5);
    EXPECT_LE(*eval_f1(in.H, in.W, y, z + dz, in.config), best + 1e-12 * std::abs(best));
  }
}

TEST(EvalF1, SignalsDomainViolation) {
  const ScenarioConfig c = UnitConfig();
  const CMatrix H = CMatrix::Constant(1, 1, 1.0);
  // 1 + 2 Re{y* h w} - |y|^2 sigma2 = 1 - 4 - 1 < 0 for y = -1, w = 2.
  EXPECT_FALSE(eval_f1(H, BeamMatrix::Constant(1, 1, 2.0), CVector::Constant(1, -1.0), 0.3, c)
                   .has_value());
}

double RelativeGradientError(const std::function<double(const BeamMatrix&)>& f,
                             const BeamMatrix& W, const BeamMatrix& g) {
  const double h = 1e-6;
  BeamMatrix fd(W.rows(), W.cols());
  for (Eigen::Index i = 0; i < W.size(); ++i) {
    BeamMatrix a = W, b = W;
    a(i) += h;
    b(i) -= h;
    const double re = (f(a) - f(b)) / (2 * h);
    a = W;
    b = W;
    a(i) += cd(0, h);
    b(i) -= cd(0, h);
    fd(i) = cd(re, (f(a) - f(b)) / (2 * h));
  }
  return (fd - g).norm() / g.norm();
}

TEST(F1Gradient, MatchesCentralDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Instance in = DeskInstance(200 + s);
    const CVector y = update_y(in.H, in.W, in.config.sigma2);
    const double z = update_z(in.H, in.W, in.config);
    Rng rng(s);
    const BeamMatrix W = in.W + 0.01 * RandomBeam(in.config.M, in.config.K, 1.0, rng);
    auto f = [&](const BeamMatrix& X) { return *eval_f1(in.H, X, y, z, in.config); };
    EXPECT_LT(RelativeGradientError(f, W, f1_gradient(in.H, W, y, z, in.config)), 1e-5);
  }
}

TEST(RatePenalty, GradientMatchesCentralDifferences) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Instance in = DeskInstance(300 + s);
    in.config.R_min = 4.0;  // keep the residuals active
    auto f = [&](const BeamMatrix& X) { return rate_residual_penalty(in.H, X, in.config); };
    ASSERT_GT(f(in.W), 0.0);
    EXPECT_LT(RelativeGradientError(f, in.W,
                                    rate_residual_penalty_gradient(in.H, in.W, in.config)),
              1e-5);
  }
}

TEST(RatePenalty, ZeroWhenRatesMet) {
  Instance in = DeskInstance(7);
  in.W = align_column_phases(in.H, in.W);  // the residual reads Re{h^H w_k}
  in.config.R_min = 0.0;
  EXPECT_EQ(rate_residual_penalty(in.H, in.W, in.config), 0.0);
  const double worst = std::min(oracle::rate(in.H, in.W, in.config.sigma2, 0),
                                oracle::rate(in.H, in.W, in.config.sigma2, 1));
  in.config.R_min = 0.5 * worst;
  EXPECT_EQ(rate_residual_penalty(in.H, in.W, in.config), 0.0);
  EXPECT_LT(max_rate_residual(in.H, in.W, in.config), 0.0);
}

TEST(ProjectRowPower, Examples) {
  Rng rng(8);
  const BeamMatrix feasible = RandomBeam(4, 2, 1.0, rng);
  EXPECT_TRUE(project_row_power(feasible, 1.0) == feasible);

  BeamMatrix W = BeamMatrix::Zero(2, 2);
  W.row(0) << cd(2.0, 0.0), cd(0.0, 0.0);  // norm^2 = 4 P_max
  W.row(1) << cd(0.1, 0.2), cd(0.3, 0.0);
  const BeamMatrix P = project_row_power(W, 1.0);
  EXPECT_NEAR(std::abs(P(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_TRUE(P.row(1) == W.row(1));

  BeamMatrix big(3, 2);
  for (int i = 0; i < big.size(); ++i) big(i) = 5.0 * complex_gaussian(rng);
  const BeamMatrix once = project_row_power(big, 0.5);
  EXPECT_TRUE(project_row_power(once, 0.5).isApprox(once, 1e-15));
  EXPECT_LE(once.rowwise().squaredNorm().maxCoeff(), 0.5 * (1 + 1e-12));
}

TEST(MatchedFilter, LoudestApAtBudget) {
  const Instance in = DeskInstance(9);
  const BeamMatrix W = matched_filter(in.H, in.config.P_max);
  EXPECT_NEAR(W.rowwise().squaredNorm().maxCoeff(), in.config.P_max, 1e-12);
  for (int k = 0; k < in.config.K; ++k) {
    const cd gain = (in.H.row(k) * W.col(k))(0);
    EXPECT_NEAR(std::abs(gain), in.H.row(k).norm() * W.col(k).norm(), 1e-9 * std::abs(gain));
  }
}

TEST(AlignColumnPhases, MakesDiagonalGainReal) {
  const Instance in = DeskInstance(10);
  const BeamMatrix A = align_column_phases(in.H, in.W);
  const CMatrix HW = in.H * A;
  for (int k = 0; k < in.config.K; ++k) {
    EXPECT_GE(HW(k, k).real(), 0.0);
    EXPECT_NEAR(HW(k, k).imag(), 0.0, 1e-12 * std::abs(HW(k, k)));
  }
  EXPECT_NEAR(oracle::sum_rate(in.H, A, in.config.sigma2),
              oracle::sum_rate(in.H, in.W, in.config.sigma2), 1e-12);
}

TEST(SolveBeamSubproblem, AscentAndBudget) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Instance in = DeskInstance(400 + s);
    const BeamMatrix W0 = align_column_phases(in.H, in.W);
    const CVector y = update_y(in.H, W0, in.config.sigma2);
    const double z = update_z(in.H, W0, in.config);
    const BeamSolverOptions opts;
    const BeamSubproblemResult r = solve_beam_subproblem(in.H, W0, y, z, in.config, opts);
    const double start = *eval_f1(in.H, W0, y, z, in.config) -
                         r.penalty_weight * rate_residual_penalty(in.H, W0, in.config);
    EXPECT_GE(r.objective, start - 1e-12 * std::abs(start));
    EXPECT_LE(r.W.rowwise().squaredNorm().maxCoeff(), in.config.P_max * (1 + 1e-12));
  }
}

TEST(SolveBeamSubproblem, ScalarPowerMatchesGrid) {
  ScenarioConfig c = UnitConfig();
  c.upsilon = 0.8;
  c.P_AP = 0.1;
  const double g = 20.0;
  const CMatrix H = CMatrix::Constant(1, 1, std::sqrt(g));
  const double z = 0.9;
  // max over (W, y) at fixed z: alternate the closed-form y with the solver.
  BeamMatrix W = BeamMatrix::Constant(1, 1, 0.1);
  for (int it = 0; it < 200; ++it)
    W = solve_beam_subproblem(H, W, update_y(H, W, c.sigma2), z, c, {}).W;
  const double p_solver = std::norm(W(0, 0));

  double best = -1e300, p_grid = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double p = c.P_max * i / 100000.0;
    const double value = 2 * z * std::sqrt(std::log2(1 + g * p)) - z * z * (p / c.upsilon + c.P_AP);
    if (value > best) best = value, p_grid = p;
  }
  ASSERT_GT(p_grid, 0.01);
  ASSERT_LT(p_grid, c.P_max - 0.01);  // interior optimum
  EXPECT_NEAR(p_solver, p_grid, 1e-3);
}

TEST(SolveBeamSubproblem, MeetsRateTargets) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Instance in = DeskInstance(500 + s);
    const BeamMatrix W0 = align_column_phases(in.H, matched_filter(in.H, in.config.P_max));
    const BeamSubproblemResult r =
        solve_beam_subproblem(in.H, W0, update_y(in.H, W0, in.config.sigma2),
                              update_z(in.H, W0, in.config), in.config, {});
    if (max_rate_residual(in.H, r.W, in.config) <= 1e-7) {
      for (int k = 0; k < in.config.K; ++k)
        EXPECT_GE(oracle::rate(in.H, r.W, in.config.sigma2, k), in.config.R_min - 1e-9);
    }
  }
}

TEST(OptimizeBeamforming, TraceNonDecreasingAndIdempotent) {
  const ScenarioConfig c = ScenarioConfig::desk();
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ChannelSet ch = sample_scenario(c, 600 + s);
    Rng rng(s);
    const PhaseVector v = random_phases(ch.I(), rng);
    const BeamMatrix W0 = matched_filter(aggregate_channels(ch, v), c.P_max);
    const BeamOptResult r = optimize_beamforming(ch, v, W0, c);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
      const bool flip = r.trace[i - 1].max_violation > 1e-7 && r.trace[i].max_violation <= 1e-7;
      if (!flip) EXPECT_GE(r.trace[i].ee, r.trace[i - 1].ee * (1 - 1e-6));
    }
    const BeamOptResult again = optimize_beamforming(ch, v, r.W, c);
    const double ee = r.trace.back().ee;
    EXPECT_NEAR(again.trace.back().ee, ee, 1e-3 * ee);
  }
}

TEST(OptimizeBeamforming, NoIrsTinyInstanceMatchesGrid) {
  ScenarioConfig c = ScenarioConfig::desk();
  c.M = 2;
  c.K = 1;
  c.L = 1;
  c.N = 1;
  c.center_end = {20.0, 0.0, 0.0};
  c.R_min = 0.0;
  c.place_standard_geometry();
  for (std::uint64_t s = 0; s < 5; ++s) {
    ChannelSet ch = sample_scenario(c, 700 + s);
    for (auto& g : ch.g_aiu) g.setZero();
    const PhaseVector v = PhaseVector::zeros(1);
    const CMatrix H = aggregate_channels(ch, v);
    const BeamOptResult r = optimize_beamforming(ch, v, matched_filter(H, c.P_max), c);
    const double ee = oracle::ee(ch, v.theta(), r.W, c);

    // Per-AP phases aligned to h are optimal for fixed powers; grid the powers.
    const double g0 = std::abs(H(0, 0)), g1 = std::abs(H(0, 1));
    double best = 0.0;
    const int steps = 400;
    for (int i = 0; i <= steps; ++i)
      for (int j = 0; j <= steps; ++j) {
        const double p0 = c.P_max * i / steps, p1 = c.P_max * j / steps;
        const double a = g0 * std::sqrt(p0) + g1 * std::sqrt(p1);
        const double rate = oracle::log2p1(a * a / c.sigma2);
        if (rate < c.R_min) continue;
        best = std::max(best, c.B * rate / ((p0 + p1) / c.upsilon + c.P_fix()));
      }
    ASSERT_GT(best, 0.0);
    EXPECT_GE(ee, 0.98 * best);
  }
}

TEST(RestoreRateFeasibility, ScalesUpWithinBudget) {
  Instance in = DeskInstance(11);
  const BeamMatrix W = 0.01 * align_column_phases(in.H, matched_filter(in.H, in.config.P_max));
  in.config.R_min = 0.5 * std::min(oracle::rate(in.H, W * 100.0, in.config.sigma2, 0),
                                   oracle::rate(in.H, W * 100.0, in.config.sigma2, 1));
  const BeamMatrix R = restore_rate_feasibility(in.H, W, in.config);
  EXPECT_LE(R.rowwise().squaredNorm().maxCoeff(), in.config.P_max * (1 + 1e-12));
  for (int k = 0; k < in.config.K; ++k)
    EXPECT_GE(oracle::rate(in.H, R, in.config.sigma2, k), in.config.R_min - 1e-9);
}

}  // namespace
}  // namespace irsee
