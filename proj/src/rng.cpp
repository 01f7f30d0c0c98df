// SPDX-License-Identifier: Apache-2.0
//
// dualband-sim: dual-band MIMO channel estimation simulator
// Copyright (C) 2026 The dualband-sim authors
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
#include "dualband/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dualband
{

std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace
{
std::mt19937_64 seeded_engine(std::uint64_t seed)
{
    std::uint64_t state = seed;
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
    return std::mt19937_64(seq);
}
} // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seeded_engine(seed)) {}

std::uint64_t RngStream::derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
{
    std::uint64_t state = seed;
    std::uint64_t out = splitmix64(state);
    for (auto id : ids)
    {
        state ^= id + 0x632BE59BD9B4E019ULL + (out << 6) + (out >> 2);
        out = splitmix64(state);
    }
    return out;
}

RngStream RngStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
{
    return RngStream(derive_seed(seed, ids));
}

RngStream RngStream::fork() { return RngStream(engine_()); }

double RngStream::uniform()
{
    // 53 random mantissa bits
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential(double mean) { return -mean * std::log1p(-uniform()); }

std::complex<double> RngStream::complex_gaussian(double variance)
{
    if (!(variance >= 0.0))
        throw std::invalid_argument("complex_gaussian: variance must be non-negative");
    const double scale = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {scale * re, scale * im};
}

std::complex<double> draw_complex_gaussian(RngStream &rng, double variance)
{
    return rng.complex_gaussian(variance);
}

} // namespace dualband
