#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace conu {

using Engine = std::mt19937_64;

/// Derives an independent seed for a named stage ("data", "labels", "init",
/// "shuffle", ...) so that changing one stage never perturbs another.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                          std::uint64_t index);

inline Engine make_engine(std::uint64_t seed, std::string_view stream) {
  return Engine(derive_seed(seed, stream));
}

inline Engine make_engine(std::uint64_t seed, std::string_view stream,
                          std::uint64_t index) {
  return Engine(derive_seed(seed, stream, index));
}

}  // namespace conu
