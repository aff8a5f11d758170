#pragma once

#include <cstdint>
#include <random>

namespace ctrace {

// Seeded 64-bit Mersenne Twister (bit-exact across standard libraries) with
// hand-rolled uniform/Bernoulli draws, since std distributions are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (master seed, stream index), e.g. one per trial.
  static Rng derive(std::uint64_t master, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double probability) { return uniform() < probability; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ctrace
