#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "irsee/types.hpp"

namespace irsee {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(master ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Circularly symmetric complex Gaussian with unit variance.
inline cd complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline PhaseVector random_phases(int size, Rng& rng) {
  RVector theta(size);
  for (int i = 0; i < size; ++i) theta(i) = kTwoPi * uniform01(rng);
  return PhaseVector(theta);
}

}  // namespace irsee
