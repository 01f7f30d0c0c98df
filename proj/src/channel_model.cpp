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
#include "dualband/channel_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dualband
{

ScenarioDraw ScenarioDraw::make(const DualBandConfig &cfg, double aod, double aoa, double k_sub6, double snr_mmw,
                                double phase_sub6, double phase_mmw)
{
    ScenarioDraw s;
    s.aod = aod;
    s.aoa = aoa;
    s.k_sub6 = k_sub6;
    s.k_mmw = cfg.k_scale * k_sub6;
    s.phase_sub6 = phase_sub6;
    s.phase_mmw = phase_mmw;
    s.snr_mmw = snr_mmw;
    s.snr_sub6 = snr_mmw * std::pow(10.0, cfg.sub6_snr_offset_db / 10.0);
    return s;
}

ComplexVector steering_vector(std::size_t num_elements, double spacing_in_wavelengths, double angle)
{
    ComplexVector a(static_cast<Eigen::Index>(num_elements));
    const double step = -2.0 * std::numbers::pi * spacing_in_wavelengths * std::sin(angle);
    for (std::size_t m = 0; m < num_elements; ++m)
        a(static_cast<Eigen::Index>(m)) = std::polar(1.0, step * static_cast<double>(m));
    return a;
}

ComplexVector steering_tx(const BandConfig &band, double aod)
{
    return steering_vector(band.num_tx, band.spacing_in_wavelengths(), aod);
}

ComplexVector steering_rx(const BandConfig &band, double aoa)
{
    return steering_vector(band.num_rx, band.spacing_in_wavelengths(), aoa);
}

ComplexMatrix gen_los(const BandConfig &band, double aod, double aoa, double phase)
{
    return std::polar(1.0, phase) * steering_rx(band, aoa) * steering_tx(band, aod).adjoint();
}

ClusterSet draw_clusters(const BandConfig &band, const ClusterProfile &profile, RngStream &rng)
{
    const double spread = profile.rms_delay_spread;
    const double tail = 1.0 - std::exp(-band.cyclic_prefix / spread);

    ClusterSet clusters(profile.num_clusters);
    double total = 0.0;
    for (auto &c : clusters)
    {
        // inverse CDF of the exponential truncated to [0, t_CP]
        c.delay = std::min(-spread * std::log1p(-rng.uniform() * tail), band.cyclic_prefix);
        c.power = std::exp(-c.delay / spread);
        total += c.power;
        c.aod = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
        c.aoa = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
        c.gain = rng.complex_gaussian(1.0);
    }
    for (auto &c : clusters)
        c.power /= total;
    return clusters;
}

ChannelTensor gen_rayleigh(const BandConfig &band, const ClusterSet &clusters)
{
    double total = 0.0;
    for (const auto &c : clusters)
    {
        if (c.delay < 0.0 || c.delay > band.cyclic_prefix)
            throw std::invalid_argument("gen_rayleigh: cluster delay outside [0, cyclic_prefix]");
        if (c.power < 0.0)
            throw std::invalid_argument("gen_rayleigh: negative cluster power");
        total += c.power;
    }
    if (!clusters.empty() && std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("gen_rayleigh: cluster powers must sum to 1");

    const auto rows = static_cast<Eigen::Index>(band.num_rx);
    const auto cols = static_cast<Eigen::Index>(band.num_tx);
    ChannelTensor h(band.num_subcarriers, rows, cols);
    if (clusters.empty() || band.num_subcarriers == 0)
        return h;

    // Slice n is column n of (spatial signatures) x (per-cluster phase ramps).
    const auto num_c = static_cast<Eigen::Index>(clusters.size());
    const auto num_sc = static_cast<Eigen::Index>(band.num_subcarriers);
    ComplexMatrix spatial(rows * cols, num_c);
    ComplexMatrix ramps(num_c, num_sc);
    for (Eigen::Index k = 0; k < num_c; ++k)
    {
        const auto &c = clusters[static_cast<std::size_t>(k)];
        const ComplexMatrix outer = (c.gain * std::sqrt(c.power)) * steering_rx(band, c.aoa) *
                                    steering_tx(band, c.aod).adjoint();
        spatial.col(k) = outer.reshaped();
        const double omega = -2.0 * std::numbers::pi * band.subcarrier_spacing * c.delay;
        for (Eigen::Index n = 0; n < num_sc; ++n)
            ramps(k, n) = std::polar(1.0, omega * static_cast<double>(n));
    }
    Eigen::Map<ComplexMatrix>(h.data().data(), rows * cols, num_sc).noalias() = spatial * ramps;
    return h;
}

ChannelTensor rician_mix(const ComplexMatrix &los, const ChannelTensor &diffuse, double k_factor)
{
    if (k_factor < 0.0)
        throw std::invalid_argument("rician_mix: negative K-factor");
    if (los.rows() != diffuse.rows() || los.cols() != diffuse.cols())
        throw std::invalid_argument("rician_mix: LOS and diffuse dimensions differ");
    const double los_amp = std::sqrt(k_factor / (1.0 + k_factor));
    const double nlos_amp = std::sqrt(1.0 / (1.0 + k_factor));
    ChannelTensor h(diffuse.size(), diffuse.rows(), diffuse.cols());
    for (std::size_t n = 0; n < diffuse.size(); ++n)
    {
        if (k_factor == 0.0)
            h[n] = diffuse[n];
        else
            h[n] = los_amp * los + nlos_amp * diffuse[n];
    }
    return h;
}

ChannelRealization gen_channel(const DualBandConfig &cfg, const ScenarioDraw &scenario, RngStream &rng)
{
    require_valid(cfg);
    const double half_pi = std::numbers::pi / 2.0;
    if (std::abs(scenario.aod) > half_pi || std::abs(scenario.aoa) > half_pi)
        throw std::invalid_argument("gen_channel: angles must lie in [-pi/2, pi/2]");
    if (scenario.k_sub6 < 0.0 || scenario.k_mmw < 0.0)
        throw std::invalid_argument("gen_channel: negative K-factor");

    RngStream sub6_rng = rng.fork();
    RngStream mmw_rng = rng.fork();

    ChannelRealization out;
    out.scenario = scenario;
    out.h_sub6 = rician_mix(gen_los(cfg.sub6, scenario.aod, scenario.aoa, scenario.phase_sub6),
                            gen_rayleigh(cfg.sub6, draw_clusters(cfg.sub6, cfg.clusters, sub6_rng)), scenario.k_sub6);
    out.h_mmw = rician_mix(gen_los(cfg.mmw, scenario.aod, scenario.aoa, scenario.phase_mmw),
                           gen_rayleigh(cfg.mmw, draw_clusters(cfg.mmw, cfg.clusters, mmw_rng)), scenario.k_mmw);
    return out;
}

} // namespace dualband
