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

#include <cstddef>
#include <optional>
#include <vector>

namespace dualband
{

// Comb pilot pattern of the first training step. Indices are 0-based: antenna t transmits
// on subcarriers t, t + M_Tx, t + 2 M_Tx, ... and no two antennas share a subcarrier.
class PilotGrid
{
public:
    explicit PilotGrid(const BandConfig &band);

    [[nodiscard]] std::size_t num_subcarriers() const { return num_subcarriers_; }
    [[nodiscard]] std::size_t num_tx() const { return num_tx_; }
    [[nodiscard]] const std::vector<std::size_t> &indices(std::size_t antenna) const { return indices_.at(antenna); }
    [[nodiscard]] std::optional<std::size_t> active_antenna(std::size_t subcarrier) const;
    [[nodiscard]] cdouble pilot(std::size_t subcarrier) const { return pilots_.at(subcarrier); }

private:
    std::size_t num_subcarriers_;
    std::size_t num_tx_;
    std::vector<std::vector<std::size_t>> indices_;
    std::vector<cdouble> pilots_;
};

// Throws std::invalid_argument when N < M_Tx.
PilotGrid allocate_pilots(const BandConfig &band);

// y[n] = H[n] phi[n] + w[n]; column n of the result is y[n] (M_Rx x N).
ComplexMatrix simulate_training_step1(const ChannelTensor &h, const PilotGrid &grid, double noise_variance,
                                      RngStream &rng);

// LS at each antenna's pilot subcarriers, linear interpolation of real and imaginary parts in
// between, nearest-value hold beyond the first/last pilot.
ChannelTensor ls_estimate_interpolate(const ComplexMatrix &received, const PilotGrid &grid);

// Second step: one beamformed pilot (+1) on every subcarrier,
// y[n] = a_rx^H H[n] a_tx phi[n] + a_rx^H w[n].
ComplexVector simulate_training_step2(const BandConfig &band, const ChannelTensor &h, double aod_est,
                                      double aoa_est, double noise_variance, RngStream &rng);

struct BeamformedScalarEstimate
{
    ComplexVector gain; // G^[n]
    double aod = 0.0;
    double aoa = 0.0;
};

// LS of the scalar beamformed channel (pilot on every subcarrier, so no interpolation).
BeamformedScalarEstimate estimate_beamformed_gain(const ComplexVector &received, double aod_est, double aoa_est);

// Keep only delay tap 0; the result is constant across subcarriers.
ComplexVector los_delay_filter(const ComplexVector &gain);

// H^[n] = a_rx(aoa) G_LOS[n] a_tx(aod)^H / (M_Rx M_Tx).
ChannelTensor reconstruct_oob_estimate(const BandConfig &band, const ComplexVector &los_gain, double aod_est,
                                       double aoa_est);

} // namespace dualband
