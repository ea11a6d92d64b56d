#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "mheal/common.hpp"

namespace mheal {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a top-level seed and a module
/// name: splitmix64(seed ^ fnv1a64(name) ^ splitmix64(stream)).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name,
                          std::uint64_t stream = 0);

/// k distinct values from [0, n) in draw order (partial Fisher-Yates).
std::vector<Index> sample_without_replacement(Index n, Index k, Rng& rng);

/// A full seeded permutation of [0, n).
std::vector<Index> permutation(Index n, Rng& rng);

/// Uniform integer in [0, n).
Index uniform_index(Index n, Rng& rng);

}  // namespace mheal
