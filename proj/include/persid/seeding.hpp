#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace persid {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a hash of a role name.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Sub-seed for a named role and index: seed ^ fnv1a64(role) ^ mix(index),
/// passed through a splitmix64 finalizer so that nested derivations do not
/// commute.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view role,
                          std::uint64_t index = 0) noexcept;

Rng make_rng(std::uint64_t seed);

}  // namespace persid
