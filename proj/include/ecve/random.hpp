#pragma once

#include <cstdint>
#include <random>

namespace ecve {

using Rng = std::mt19937_64;

/// Deterministically derives an independent seed for sub-stream `index` of
/// subsystem `stream` from a user seed (splitmix64 finalizer chain).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream,
                    std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

/// Stream identifiers, one per subsystem consuming randomness.
namespace streams {
inline constexpr std::uint64_t kOptimizerRestarts = 1;
inline constexpr std::uint64_t kSimulationData = 2;
inline constexpr std::uint64_t kSimulationFit = 3;
inline constexpr std::uint64_t kGradCheck = 4;
} // namespace streams

} // namespace ecve
