#include <doctest.h>

#include <set>

#include "tvpf/rng.hpp"

using namespace tvpf;

TEST_SUITE("synth-data") {

TEST_CASE("substreams are reproducible and keyed by every coordinate") {
  auto a = substream(7, 3, 11, StreamKind::Resample);
  auto b = substream(7, 3, 11, StreamKind::Resample);
  for (int i = 0; i < 5; ++i) CHECK(a() == b());

  std::set<std::uint64_t> keys;
  keys.insert(mix_key(7, 3, 11, StreamKind::Resample));
  keys.insert(mix_key(8, 3, 11, StreamKind::Resample));
  keys.insert(mix_key(7, 4, 11, StreamKind::Resample));
  keys.insert(mix_key(7, 3, 12, StreamKind::Resample));
  keys.insert(mix_key(7, 3, 11, StreamKind::TvpDrift));
  keys.insert(mix_key(7, 11, 3, StreamKind::Resample));
  CHECK(keys.size() == 6);
}

}
