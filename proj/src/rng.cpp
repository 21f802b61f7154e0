#include "tvpf/rng.hpp"

namespace tvpf {

namespace {

// splitmix64 finalizer
std::uint64_t avalanche(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t step,
                      std::uint64_t particle, StreamKind kind) {
  std::uint64_t h = avalanche(seed);
  h = avalanche(h ^ static_cast<std::uint64_t>(kind));
  h = avalanche(h ^ step);
  h = avalanche(h ^ particle);
  return h;
}

}  // namespace tvpf
