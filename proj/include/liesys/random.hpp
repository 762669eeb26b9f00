#pragma once

#include <cstdint>
#include <random>

#include "liesys/lie_core.hpp"

namespace liesys {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 42;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vector uniform_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

inline AlgebraElement random_algebra(const GroupModel& m, Rng& rng, double scale = 1.0) {
  return AlgebraElement(uniform_vector(rng, m.dim, -scale, scale));
}

// exp of a random algebra element; always inside the chart.
inline GroupElement random_group(const GroupModel& m, Rng& rng, double scale = 1.0) {
  return exp(m, random_algebra(m, rng, scale));
}

}  // namespace liesys
