// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The nestnull Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/**
 * @file random.hpp
 * Keyed random streams. Every random quantity of a trial is drawn from a
 * stream derived from (seed, key...), so results do not depend on the
 * order in which trials or sweep points are visited.
 */
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nestnull {

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hash of a seed and a key path.
inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t state = seed;
    std::uint64_t h = splitmix64(state);
    for (auto k : keys) {
        state = h ^ (k + 0x632be59bd9b4e019ULL);
        h = splitmix64(state);
    }
    return h;
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
{
    std::uint64_t state = stream_key(seed, keys);
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
    return std::mt19937_64(seq);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template <class Rng>
double uniform01(Rng& rng)
{
    return unit_uniform(rng());
}

/// Uniform in [0, n).
inline std::uint64_t uniform_below(std::uint64_t bits, std::uint64_t n)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

}  // namespace nestnull
