/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace qisim {

/// Engine used for every simulation path. Results are bit-reproducible for a given
/// standard library; distributions in <random> are not portable across vendors.
using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Independent substream derived from (seed, key path). Workers that own distinct key
/// paths never share state, so results do not depend on scheduling or thread count.
inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {}) {
    std::uint64_t state = seed;
    std::uint64_t h = detail::splitmix64(state);
    for (std::uint64_t key : keys) {
        state = h ^ (key + 0x632be59bd9b4e019ULL);
        h = detail::splitmix64(state);
    }
    state = h;
    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t v = detail::splitmix64(state);
        words[i] = static_cast<std::uint32_t>(v);
        words[i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

} // namespace qisim
