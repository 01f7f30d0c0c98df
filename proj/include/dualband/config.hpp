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

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualband
{

inline constexpr double speed_of_light = 299792458.0;

// Geometry and OFDM numerology of one frequency band.
struct BandConfig
{
    double carrier_frequency = 0.0;  // Hz
    double wavelength = 0.0;         // m
    double bandwidth = 0.0;          // Hz
    double subcarrier_spacing = 0.0; // Hz
    std::size_t num_subcarriers = 0;
    std::size_t num_tx = 0;
    std::size_t num_rx = 0;
    double antenna_spacing = 0.0; // m
    double cyclic_prefix = 0.0;   // s

    [[nodiscard]] double spacing_in_wavelengths() const { return antenna_spacing / wavelength; }
};

// Statistical profile of the diffuse (cluster tapped-delay-line) channel part.
struct ClusterProfile
{
    std::size_t num_clusters = 20;
    double rms_delay_spread = 100e-9; // s
};

struct DualBandConfig
{
    BandConfig sub6;
    BandConfig mmw;
    double k_scale = 1.0;            // K(mmw) = k_scale * K(sub6)
    double total_tx_power = 1.0;     // linear
    double sub6_snr_offset_db = 20.0; // sub-6 GHz pre-beamforming SNR above the mmWave SNR
    ClusterProfile clusters;

    // Carrier, bandwidth and MIMO parameters of the reference 2.55 GHz / 25.5 GHz system,
    // half-wavelength arrays.
    static DualBandConfig reference();
};

struct ConfigError
{
    std::string field;
    std::string message;
};

// Every violated invariant, each naming its field (e.g. "mmw.num_tx"). Empty means valid.
std::vector<ConfigError> validate_config(const DualBandConfig &cfg);

class ConfigException : public std::runtime_error
{
public:
    explicit ConfigException(std::vector<ConfigError> errors);
    [[nodiscard]] const std::vector<ConfigError> &errors() const { return errors_; }

private:
    std::vector<ConfigError> errors_;
};

// Throws ConfigException when validate_config reports anything.
void require_valid(const DualBandConfig &cfg);

// JSON mapping. Missing keys keep the reference() values, except that a band without an
// explicit wavelength, num_subcarriers or antenna_spacing gets c/f, round(B/df) and
// wavelength/2 respectively.
void to_json(nlohmann::json &j, const BandConfig &b);
void to_json(nlohmann::json &j, const DualBandConfig &cfg);
DualBandConfig config_from_json(const nlohmann::json &j);
DualBandConfig load_config(const std::filesystem::path &path);

} // namespace dualband
