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
#include "dualband/types.hpp"

#include <string>

namespace dualband
{

struct AngleEstimate
{
    double aoa = 0.0; // rad
    double aod = 0.0; // rad
    double objective = 0.0;
};

inline constexpr std::size_t default_angle_grid = 181;

// Beamspace matched-filter search: maximises J(aoa, aod) = sum_n |a_rx^H H[n] a_tx|^2 over a
// uniform grid in sin-space, then one golden-section pass per axis inside the neighbouring
// grid cells. Ties go to the smaller grid index. `spacing_in_wavelengths` is dd / lambda of
// the array that produced `h`.
AngleEstimate estimate_angles(const ChannelTensor &h, double spacing_in_wavelengths,
                              std::size_t grid_size = default_angle_grid);

// J(aoa, aod) for the given estimate tensor.
double angle_objective(const ChannelTensor &h, double spacing_in_wavelengths, double aoa, double aod);

inline constexpr double k_factor_max = 1e4;

// Method-of-moments K from the power of every entry across antennas and subcarriers:
// g = var(|h|^2) / mean(|h|^2)^2, K = sqrt(1-g) / (1 - sqrt(1-g)), g clamped to [1e-6, 1],
// K clamped to [0, 1e4]. Needs at least 8 entries.
double estimate_k_factor(const ChannelTensor &h);
double estimate_k_factor(const ComplexVector &samples);

// Approximate optimal combining factor
// w = M sigma^2 / (M / (1 + c_K K) + (1 + M) sigma^2), M = M_Tx M_Rx of the mmWave band.
double mrc_weight(double k_factor_sub6, double noise_variance, const DualBandConfig &cfg);
double mrc_weight(double k_factor_sub6, double noise_variance, std::size_t num_tx, std::size_t num_rx, double k_scale);

struct CombinedEstimate
{
    ChannelTensor h;
    std::string method;
    double weight = 0.0; // MRC only
};

// w H^ + (1 - w) H~ per subcarrier.
CombinedEstimate mrc_combine(const ChannelTensor &oob, const ChannelTensor &inband, double weight);

CombinedEstimate baseline_inband(const ChannelTensor &inband);
CombinedEstimate baseline_perfect(const ChannelTensor &truth);

} // namespace dualband
