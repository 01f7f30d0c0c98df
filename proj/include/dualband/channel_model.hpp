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

#include <vector>

namespace dualband
{

// Drawn parameters of one dual-band link. Angles in radians, K-factors and SNRs linear.
struct ScenarioDraw
{
    double aod = 0.0;
    double aoa = 0.0;
    double k_sub6 = 0.0;
    double k_mmw = 0.0;
    double phase_sub6 = 0.0;
    double phase_mmw = 0.0;
    double snr_mmw = 1.0;
    double snr_sub6 = 1.0;

    // Builds a scenario with K(mmw) = k_scale * K(sub6) and the configured sub-6 SNR offset.
    static ScenarioDraw make(const DualBandConfig &cfg, double aod, double aoa, double k_sub6, double snr_mmw,
                             double phase_sub6, double phase_mmw);
};

struct Cluster
{
    double delay = 0.0; // s
    double power = 0.0; // linear, sums to 1 over the set
    double aod = 0.0;
    double aoa = 0.0;
    cdouble gain{0.0, 0.0}; // CN(0, 1)
};

using ClusterSet = std::vector<Cluster>;

struct ChannelRealization
{
    ScenarioDraw scenario;
    ChannelTensor h_sub6;
    ChannelTensor h_mmw;
};

// ULA response, element m = exp(-j 2 pi m (dd / lambda) sin(angle)).
ComplexVector steering_vector(std::size_t num_elements, double spacing_in_wavelengths, double angle);
ComplexVector steering_tx(const BandConfig &band, double aod);
ComplexVector steering_rx(const BandConfig &band, double aoa);

// exp(j chi) a_rx(aoa) a_tx(aod)^H
ComplexMatrix gen_los(const BandConfig &band, double aod, double aoa, double phase);

// Exponential delay profile truncated at the cyclic prefix, powers from the same profile,
// angles uniform on [-pi/2, pi/2], CN(0, 1) gains.
ClusterSet draw_clusters(const BandConfig &band, const ClusterProfile &profile, RngStream &rng);

// H_rp[n] = sum_c g_c sqrt(p_c) a_rx(aoa_c) a_tx(aod_c)^H exp(-j 2 pi n df tau_c).
// Throws if a delay exceeds the cyclic prefix or powers do not sum to 1.
ChannelTensor gen_rayleigh(const BandConfig &band, const ClusterSet &clusters);

// Rician mix sqrt(K/(1+K)) H_fs + sqrt(1/(1+K)) H_rp[n] for both bands. The two diffuse
// parts come from separate forks of `rng`.
ChannelRealization gen_channel(const DualBandConfig &cfg, const ScenarioDraw &scenario, RngStream &rng);

// Single-band building block used by gen_channel.
ChannelTensor rician_mix(const ComplexMatrix &los, const ChannelTensor &diffuse, double k_factor);

} // namespace dualband
