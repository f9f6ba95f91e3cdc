#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace wishart {

using Rng = std::mt19937_64;

inline constexpr const char* kRngAlgorithm = "mt19937_64 seeded by std::seed_seq(seed, stream ids)";

/// Independent reproducible stream for (seed, ids...). Streams for distinct id
/// tuples are decorrelated through seed_seq mixing, so a trial or chunk can be
/// regenerated without replaying the others.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> ids = {}) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * ids.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto id : ids) push(id);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace wishart
