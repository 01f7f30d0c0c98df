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

#include "dualband/config.hpp"
#include "dualband/rng.hpp"
#include "dualband/types.hpp"

#include <cmath>

namespace testing
{

// Reference geometry with fewer subcarriers, for Monte-Carlo loops.
inline dualband::BandConfig shrink(dualband::BandConfig band, std::size_t subcarriers, std::size_t antennas = 8)
{
    band.num_subcarriers = subcarriers;
    band.bandwidth = band.subcarrier_spacing * static_cast<double>(subcarriers);
    band.num_tx = antennas;
    band.num_rx = antennas;
    return band;
}

inline dualband::DualBandConfig small_config(std::size_t sub6_n, std::size_t mmw_n, std::size_t antennas = 8)
{
    auto cfg = dualband::DualBandConfig::reference();
    cfg.sub6 = shrink(cfg.sub6, sub6_n, antennas);
    cfg.mmw = shrink(cfg.mmw, mmw_n, antennas);
    return cfg;
}

inline dualband::ChannelTensor flat_tensor(const dualband::ComplexMatrix &m, std::size_t n)
{
    dualband::ChannelTensor t(n, m.rows(), m.cols());
    for (std::size_t i = 0; i < n; ++i)
        t.set(i, m);
    return t;
}

inline dualband::ChannelTensor random_tensor(std::size_t n, Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    dualband::RngStream rng(seed);
    dualband::ChannelTensor t(n, rows, cols);
    for (auto &x : t.data())
        x = rng.complex_gaussian(1.0);
    return t;
}

inline double second_singular_ratio(const dualband::ComplexMatrix &m)
{
    Eigen::JacobiSVD<dualband::ComplexMatrix> svd(m);
    const auto &s = svd.singularValues();
    return s.size() > 1 ? s(1) / s(0) : 0.0;
}

} // namespace testing
