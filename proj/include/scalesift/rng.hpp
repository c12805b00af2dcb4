#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scalesift {

using Engine = std::mt19937_64;

// Seed for a named random stream. Every stage draws from its own stream so
// stages can be regenerated independently; the indices pick a sub-stream
// (concept, location, tile, ...).
std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

inline Engine stream_engine(std::uint64_t seed, std::string_view stream, std::uint64_t a = 0,
                            std::uint64_t b = 0, std::uint64_t c = 0) {
  return Engine(stream_seed(seed, stream, a, b, c));
}

}  // namespace scalesift
