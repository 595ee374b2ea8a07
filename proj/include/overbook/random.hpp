#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace overbook {

using Rng = std::mt19937_64;

// splitmix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-trial seed: a counter stepped by an odd constant, then mixed. For a
// fixed master seed the map trial -> seed is injective, and the seed depends
// only on (master_seed, trial), never on which worker runs the trial.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t trial_index) noexcept {
  constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  return mix64(master_seed + kGolden * (trial_index + 1));
}

inline constexpr const char* kSeedDerivationRule =
    "splitmix64(master_seed + 0x9e3779b97f4a7c15 * (trial + 1)) -> mt19937_64";

// Uniform on [0, 1) with 53 random bits. Independent of the standard
// library's distribution implementations, so streams are portable.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on (0, 1); used where log(0) must be avoided.
inline double uniform_open01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial_index) {
  return Rng(derive_seed(master_seed, trial_index));
}

}  // namespace overbook
