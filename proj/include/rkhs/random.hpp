#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace rkhs {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a, used to turn method names into stream keys.
std::uint64_t hash_name(std::string_view name);

/// Seed of an independent stream: splitmix64 folded over (seed, keys...).
/// Depends only on its arguments, never on scheduling.
std::uint64_t stream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Uniform draw in the open interval (0, 1) with 53 random bits.
double uniform01(Rng& rng);

}  // namespace rkhs
