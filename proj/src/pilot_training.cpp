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
#include "dualband/pilot_training.hpp"

#include "dualband/channel_model.hpp"
#include "dualband/dft.hpp"

#include <stdexcept>

namespace dualband
{

PilotGrid::PilotGrid(const BandConfig &band)
    : num_subcarriers_(band.num_subcarriers), num_tx_(band.num_tx), indices_(band.num_tx),
      pilots_(band.num_subcarriers, cdouble(1.0, 0.0))
{
    if (num_tx_ < 1)
        throw std::invalid_argument("allocate_pilots: need at least one transmit antenna");
    if (num_subcarriers_ < num_tx_)
        throw std::invalid_argument("allocate_pilots: fewer subcarriers than transmit antennas");
    for (std::size_t t = 0; t < num_tx_; ++t)
        for (std::size_t n = t; n < num_subcarriers_; n += num_tx_)
            indices_[t].push_back(n);
}

std::optional<std::size_t> PilotGrid::active_antenna(std::size_t subcarrier) const
{
    if (subcarrier >= num_subcarriers_)
        return std::nullopt;
    return subcarrier % num_tx_;
}

PilotGrid allocate_pilots(const BandConfig &band) { return PilotGrid(band); }

ComplexMatrix simulate_training_step1(const ChannelTensor &h, const PilotGrid &grid, double noise_variance,
                                      RngStream &rng)
{
    if (h.size() != grid.num_subcarriers() || static_cast<std::size_t>(h.cols()) != grid.num_tx())
        throw std::invalid_argument("simulate_training_step1: channel and pilot grid dimensions differ");
    ComplexMatrix y(h.rows(), static_cast<Eigen::Index>(h.size()));
    for (std::size_t n = 0; n < h.size(); ++n)
    {
        const auto t = static_cast<Eigen::Index>(*grid.active_antenna(n));
        const auto col = static_cast<Eigen::Index>(n);
        y.col(col) = h[n].col(t) * grid.pilot(n);
        for (Eigen::Index r = 0; r < h.rows(); ++r)
            y(r, col) += rng.complex_gaussian(noise_variance);
    }
    return y;
}

ChannelTensor ls_estimate_interpolate(const ComplexMatrix &received, const PilotGrid &grid)
{
    const std::size_t num_sc = grid.num_subcarriers();
    if (static_cast<std::size_t>(received.cols()) != num_sc)
        throw std::invalid_argument("ls_estimate_interpolate: received block has wrong subcarrier count");

    ChannelTensor est(num_sc, received.rows(), static_cast<Eigen::Index>(grid.num_tx()));
    for (std::size_t t = 0; t < grid.num_tx(); ++t)
    {
        const auto &idx = grid.indices(t);
        const auto tc = static_cast<Eigen::Index>(t);
        auto ls = [&](std::size_t n) -> ComplexVector {
            return received.col(static_cast<Eigen::Index>(n)) / grid.pilot(n);
        };

        const ComplexVector first = ls(idx.front());
        for (std::size_t n = 0; n <= idx.front(); ++n)
            est[n].col(tc) = first;

        ComplexVector left = first;
        for (std::size_t k = 1; k < idx.size(); ++k)
        {
            const std::size_t n0 = idx[k - 1];
            const std::size_t n1 = idx[k];
            const ComplexVector right = ls(n1);
            const auto span = static_cast<double>(n1 - n0);
            for (std::size_t n = n0 + 1; n <= n1; ++n)
            {
                const double a = static_cast<double>(n - n0) / span;
                est[n].col(tc) = (1.0 - a) * left + a * right;
            }
            left = right;
        }
        for (std::size_t n = idx.back() + 1; n < num_sc; ++n)
            est[n].col(tc) = left;
    }
    return est;
}

ComplexVector simulate_training_step2(const BandConfig &band, const ChannelTensor &h, double aod_est,
                                      double aoa_est, double noise_variance, RngStream &rng)
{
    if (static_cast<std::size_t>(h.rows()) != band.num_rx || static_cast<std::size_t>(h.cols()) != band.num_tx)
        throw std::invalid_argument("simulate_training_step2: channel does not match band");
    const ComplexVector a_tx = steering_tx(band, aod_est);
    const ComplexVector a_rx = steering_rx(band, aoa_est);
    const cdouble pilot(1.0, 0.0);

    ComplexVector y(static_cast<Eigen::Index>(h.size()));
    ComplexVector w(h.rows());
    for (std::size_t n = 0; n < h.size(); ++n)
    {
        for (Eigen::Index r = 0; r < w.size(); ++r)
            w(r) = rng.complex_gaussian(noise_variance);
        const cdouble g = a_rx.dot(h[n] * a_tx); // dot() conjugates its left operand
        y(static_cast<Eigen::Index>(n)) = g * pilot + a_rx.dot(w);
    }
    return y;
}

BeamformedScalarEstimate estimate_beamformed_gain(const ComplexVector &received, double aod_est, double aoa_est)
{
    const cdouble pilot(1.0, 0.0);
    return {received / pilot, aod_est, aoa_est};
}

ComplexVector los_delay_filter(const ComplexVector &gain)
{
    ComplexVector taps = freq_to_delay(gain);
    taps.tail(taps.size() - 1).setZero();
    return delay_to_freq(taps);
}

ChannelTensor reconstruct_oob_estimate(const BandConfig &band, const ComplexVector &los_gain, double aod_est,
                                       double aoa_est)
{
    const ComplexMatrix outer = steering_rx(band, aoa_est) * steering_tx(band, aod_est).adjoint() /
                                static_cast<double>(band.num_rx * band.num_tx);
    ChannelTensor est(static_cast<std::size_t>(los_gain.size()), outer.rows(), outer.cols());
    for (std::size_t n = 0; n < est.size(); ++n)
        est[n] = los_gain(static_cast<Eigen::Index>(n)) * outer;
    return est;
}

} // namespace dualband
