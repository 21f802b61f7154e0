#pragma once

#include <cstdint>
#include <random>

namespace tvpf {

// What a random stream is used for. Each (seed, step, particle, kind) tuple
// owns an independent engine, so results do not depend on the order in which
// particles are processed.
enum class StreamKind : std::uint64_t {
  ObservationNoise = 1,
  PriorState = 2,
  PriorTheta = 3,
  PriorDrift = 4,
  Resample = 5,
  StateInnovation = 6,
  DriftJitter = 7,
  TvpDrift = 8,
};

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t step,
                      std::uint64_t particle, StreamKind kind);

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t step,
                                 std::uint64_t particle, StreamKind kind) {
  return std::mt19937_64(mix_key(seed, step, particle, kind));
}

}  // namespace tvpf
