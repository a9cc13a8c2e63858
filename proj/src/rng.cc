#include "vneap/rng.h"

#include <cmath>

#include "vneap/domain.h"

namespace vneap {

uint64_t stable_hash(std::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

uint64_t Rng::below(uint64_t bound) {
  if (bound == 0) return 0;
  // Rejection sampling keeps the result unbiased.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal(double mean, double stddev) {
  // Box-Muller; u1 in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                    std::cos(2.0 * M_PI * u2);
}

double Rng::lognormal(double mu, double sigma) {
  return std::exp(normal(mu, sigma));
}

size_t weighted_random_select(std::span<const double> weights, Rng& rng) {
  double total = 0;
  size_t last = weights.size();
  for (size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0) {
      total += weights[k];
      last = k;
    }
  }
  if (!(total > 0)) throw InputError("weighted selection over zero weights");
  const double target = rng.uniform() * total;
  double cumulative = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0)) continue;
    cumulative += weights[k];
    if (target < cumulative) return k;
  }
  return last;
}

}  // namespace vneap
