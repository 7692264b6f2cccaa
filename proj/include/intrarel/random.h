#ifndef INTRAREL_RANDOM_H_
#define INTRAREL_RANDOM_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace intrarel {

// std::mt19937_64 is fully specified by the standard, the <random>
// distributions are not. These helpers keep every seeded result identical
// across standard library implementations.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace intrarel

#endif  // INTRAREL_RANDOM_H_
