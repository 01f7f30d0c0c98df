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

#include "dualband/types.hpp"

#include <span>

namespace dualband
{

// Unitary DFT pair between the subcarrier (frequency) index and the delay-tap index.
// freq_to_delay:  g[t] = 1/sqrt(N) * sum_n h[n] exp(+j 2 pi n t / N)
// delay_to_freq:  h[n] = 1/sqrt(N) * sum_t g[t] exp(-j 2 pi n t / N)
// A path with delay k / (N df) therefore lands on tap k. Empty input throws.
ComplexVector freq_to_delay(std::span<const cdouble> h);
ComplexVector delay_to_freq(std::span<const cdouble> g);

inline ComplexVector freq_to_delay(const ComplexVector &h) { return freq_to_delay(std::span<const cdouble>(h.data(), static_cast<std::size_t>(h.size()))); }
inline ComplexVector delay_to_freq(const ComplexVector &g) { return delay_to_freq(std::span<const cdouble>(g.data(), static_cast<std::size_t>(g.size()))); }

} // namespace dualband
