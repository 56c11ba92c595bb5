#pragma once

#include <cstdint>

namespace uat {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based uniform draw in [0, 1). The value depends only on
/// (seed, stream, index), so samples can be generated in any order or in
/// parallel without changing results.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Stream tags so independent consumers of one seed never share draws.
namespace streams {
inline constexpr std::uint64_t kHiddenWeights = 0x7765696768747321ULL;
inline constexpr std::uint64_t kHiddenBiases = 0x6269617365732121ULL;
inline constexpr std::uint64_t kTrainingSamples = 0x747261696e696e67ULL;
inline constexpr std::uint64_t kEvaluationSamples = 0x6576616c75617465ULL;
inline constexpr std::uint64_t kMonteCarlo = 0x6d6f6e7465636172ULL;
}  // namespace streams

}  // namespace uat
