#pragma once

// Straight-line re-implementations used as test oracles. Nothing here calls
// the library's metric or channel algebra.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "irsee/types.hpp"

namespace oracle {

using irsee::cd;

inline double log2p1(double x) { return std::log(1.0 + x) / std::log(2.0); }

/// h^H_k = sum_l g^H_IU,lk Phi_l G_AI,l + g^H_AU,k with Phi_l materialized.
inline Eigen::RowVectorXcd explicit_aggregate(const irsee::ChannelSet& ch,
                                              const Eigen::VectorXd& theta,
                                              int k) {
  Eigen::RowVectorXcd h = ch.g_au.row(k);
  for (int l = 0; l < ch.L; ++l) {
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(ch.N, ch.N);
    for (int n = 0; n < ch.N; ++n)
      phi(n, n) = std::polar(1.0, theta(l * ch.N + n));
    Eigen::RowVectorXcd giu(ch.N);
    for (int n = 0; n < ch.N; ++n) giu(n) = ch.g_iu[l][k](n);
    h += giu * phi * ch.g_ai[l];
  }
  return h;
}

/// Received-signal coefficients r_kj = sum_m h_km w_mj, by explicit loops.
inline Eigen::MatrixXcd received(const Eigen::MatrixXcd& H,
                                 const Eigen::MatrixXcd& W) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(H.rows(), W.cols());
  for (int k = 0; k < H.rows(); ++k)
    for (int j = 0; j < W.cols(); ++j)
      for (int m = 0; m < H.cols(); ++m) r(k, j) += H(k, m) * W(m, j);
  return r;
}

/// Rate of user k assembled term by term from the received signal.
inline double rate(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& W,
                   double sigma2, int k) {
  const Eigen::MatrixXcd r = received(H, W);
  double signal = 0.0;
  double interference = 0.0;
  for (int j = 0; j < W.cols(); ++j) {
    const double p = std::norm(r(k, j));
    if (j == k) signal += p;
    else interference += p;
  }
  return log2p1(signal / (interference + sigma2));
}

inline double sum_rate(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& W,
                       double sigma2) {
  double s = 0.0;
  for (int k = 0; k < H.rows(); ++k) s += rate(H, W, sigma2, k);
  return s;
}

inline double power(const Eigen::MatrixXcd& W, const irsee::ScenarioConfig& c) {
  double f = 0.0;
  for (int m = 0; m < W.rows(); ++m)
    for (int k = 0; k < W.cols(); ++k) f += std::norm(W(m, k));
  return f / c.upsilon + c.M * c.P_AP + c.K * c.P_User +
         c.L * c.N * c.P_IRS;
}

inline Eigen::MatrixXcd explicit_channels(const irsee::ChannelSet& ch,
                                          const Eigen::VectorXd& theta) {
  Eigen::MatrixXcd H(ch.K, ch.M);
  for (int k = 0; k < ch.K; ++k) H.row(k) = explicit_aggregate(ch, theta, k);
  return H;
}

inline double ee(const irsee::ChannelSet& ch, const Eigen::VectorXd& theta,
                 const Eigen::MatrixXcd& W, const irsee::ScenarioConfig& c) {
  return c.B * sum_rate(explicit_channels(ch, theta), W, c.sigma2) /
         power(W, c);
}

/// -v^H Theta v + 2 Re{v^H u} with v^H = p^T, by explicit double sums.
inline double quadratic(const Eigen::MatrixXcd& Theta, const Eigen::VectorXcd& u,
                        const Eigen::VectorXd& theta) {
  const int n = static_cast<int>(theta.size());
  cd quad = 0.0;
  cd lin = 0.0;
  for (int i = 0; i < n; ++i) {
    const cd pi = std::polar(1.0, theta(i));
    lin += pi * u(i);
    for (int j = 0; j < n; ++j)
      quad += pi * Theta(i, j) * std::conj(std::polar(1.0, theta(j)));
  }
  return -quad.real() + 2.0 * lin.real();
}

/// Maximum of `quadratic` over a uniform grid with `steps` angles per element.
inline double grid_max_quadratic(const Eigen::MatrixXcd& Theta,
                                 const Eigen::VectorXcd& u, int steps) {
  const int n = static_cast<int>(u.size());
  std::vector<cd> unit(steps);
  for (int s = 0; s < steps; ++s)
    unit[s] = std::polar(1.0, 2.0 * irsee::kPi * s / steps);
  std::vector<int> idx(n, 0);
  std::vector<cd> p(n);
  double best = -1e300;
  while (true) {
    for (int i = 0; i < n; ++i) p[i] = unit[idx[i]];
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
      value += 2.0 * (p[i] * u(i)).real() - Theta(i, i).real();
      for (int j = i + 1; j < n; ++j)
        value -= 2.0 * (p[i] * Theta(i, j) * std::conj(p[j])).real();
    }
    if (value > best) best = value;
    int i = 0;
    while (i < n && ++idx[i] == steps) idx[i++] = 0;
    if (i == n) break;
  }
  return best;
}

}  // namespace oracle
