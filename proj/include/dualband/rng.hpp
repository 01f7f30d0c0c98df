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
#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace dualband
{

// Seedable random stream. Equal seeds give equal draw sequences (within this build).
// Child streams for parallel work are derived with derive() from a root seed and a set of
// indices, so results do not depend on scheduling order.
class RngStream
{
public:
    explicit RngStream(std::uint64_t seed);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    // Independent stream keyed by (seed, ids...).
    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);
    static std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids);

    // New stream seeded from this one's next output.
    RngStream fork();

    std::uint64_t next_u64() { return engine_(); }
    double uniform(); // [0, 1)
    double uniform(double lo, double hi);
    double normal(); // N(0, 1)
    double exponential(double mean);

    // Circularly symmetric CN(0, variance): real and imaginary parts each N(0, variance/2).
    // Always consumes two normal draws, also for variance 0.
    std::complex<double> complex_gaussian(double variance);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t &state);

// Free-function form of RngStream::complex_gaussian; rejects negative variance.
std::complex<double> draw_complex_gaussian(RngStream &rng, double variance);

} // namespace dualband
