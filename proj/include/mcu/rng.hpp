#ifndef MCU_RNG_HPP
#define MCU_RNG_HPP

#include <cstdint>
#include <random>

namespace mcu {

/// Deterministic RNG used everywhere randomness is needed.
///
/// The engine is std::mt19937_64, whose output sequence is pinned by the
/// C++ standard, and all variate transforms are implemented here (the
/// std::*_distribution classes are implementation-defined and would break
/// the bit-reproducibility contract across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1): top 53 bits of the next word.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1].
  double uniform_open_left() { return 1.0 - uniform(); }

  /// Standard normal via Box-Muller; the spare variate is cached.
  double normal();

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 mix function, used to derive independent per-stream seeds
/// from a root seed (stream 0, 1, 2, ... give unrelated chains).
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

}  // namespace mcu

#endif
