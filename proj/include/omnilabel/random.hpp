#pragma once

#include <cstdint>
#include <random>

namespace omnilabel {

// splitmix64 finalizer; used to derive independent per-item streams from one seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Seeded generator whose output is identical on every platform. The raw engine
// sequence of std::mt19937_64 is fixed by the standard; the standard
// distributions are not, so the transforms live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller; caches the second variate.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace omnilabel
