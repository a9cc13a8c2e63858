#ifndef VNEAP_RNG_H
#define VNEAP_RNG_H

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace vneap {

uint64_t stable_hash(std::string_view text);  // FNV-1a
uint64_t splitmix64(uint64_t x);

// Deterministic generator. Streams derived from (seed, label, index) are
// independent of the order in which they are created.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng Derive(uint64_t seed, std::string_view label, uint64_t index = 0) {
    return Rng(splitmix64(seed ^ stable_hash(label)) + splitmix64(index + 1));
  }

  uint64_t next() { return engine_(); }
  double uniform();                 // [0, 1)
  uint64_t below(uint64_t bound);   // [0, bound)
  double normal(double mean, double stddev);
  double lognormal(double mu, double sigma);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Index k with probability w_k / sum(w). Throws InputError when no weight is
// positive.
size_t weighted_random_select(std::span<const double> weights, Rng& rng);

}  // namespace vneap

#endif  // VNEAP_RNG_H
