// Copyright 2026 The mcvd Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <boost/random/mersenne_twister.hpp>

namespace mcvd {

using Engine = boost::random::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of replication `index` under `base_seed`. Distinct indices give
/// distinct, well-dispersed 64-bit seeds.
constexpr std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) {
    return mix64(mix64(base_seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
}

} // namespace mcvd
