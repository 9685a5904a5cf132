// random.hpp
//
// Seeded engine construction. Every random stream in the project is an
// std::mt19937_64 seeded through std::seed_seq from (seed, stream ids...),
// so independent substreams (per station, per restart, per round) never
// share state and replay identically.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace uavnet {

using Engine = std::mt19937_64;

// Stream tags used to derive per-module seeds from the master seed.
enum class Stream : std::uint64_t {
  mobility = 1,
  predictor = 2,
  clustering = 3,
  radios = 4,
  traffic = 5,
  bench = 6,
};

inline Engine make_engine(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> streams = {}) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * streams.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto s : streams) push(s);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream) {
  auto engine = make_engine(master, {static_cast<std::uint64_t>(stream)});
  return engine();
}

}  // namespace uavnet
