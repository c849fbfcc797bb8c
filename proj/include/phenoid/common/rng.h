#ifndef PHENOID_COMMON_RNG_H_
#define PHENOID_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace phenoid {

// Mixes a parent seed with a stream tag into an independent child seed.
uint64_t DeriveSeed(uint64_t seed, uint64_t tag);
uint64_t DeriveSeed(uint64_t seed, std::string_view tag);

// Deterministic random source. The engine is std::mt19937_64 (bit-exact across
// standard libraries); the distributions are implemented here because the
// standard ones are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n). n must be > 0.
  uint64_t Index(uint64_t n);
  double Normal(double mean, double stddev);
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace phenoid

#endif  // PHENOID_COMMON_RNG_H_
