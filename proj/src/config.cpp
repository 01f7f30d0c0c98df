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
#include "dualband/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dualband
{

namespace
{

BandConfig make_band(double fc, double wavelength, double bandwidth, double df, std::size_t antennas, double cp)
{
    BandConfig b;
    b.carrier_frequency = fc;
    b.wavelength = wavelength;
    b.bandwidth = bandwidth;
    b.subcarrier_spacing = df;
    b.num_subcarriers = static_cast<std::size_t>(std::llround(bandwidth / df));
    b.num_tx = antennas;
    b.num_rx = antennas;
    b.antenna_spacing = wavelength / 2.0;
    b.cyclic_prefix = cp;
    return b;
}

void validate_band(const BandConfig &b, const std::string &prefix, std::vector<ConfigError> &errors)
{
    auto fail = [&](const char *field, std::string msg) { errors.push_back({prefix + "." + field, std::move(msg)}); };

    if (!(b.carrier_frequency > 0.0))
        fail("carrier_frequency", "must be positive");
    if (!(b.wavelength > 0.0))
        fail("wavelength", "must be positive");
    else if (b.carrier_frequency > 0.0)
    {
        const double expected = speed_of_light / b.carrier_frequency;
        if (std::abs(b.wavelength - expected) > 1e-3 * expected)
            fail("wavelength", "differs from c / carrier_frequency by more than 0.1%");
    }
    if (!(b.bandwidth > 0.0))
        fail("bandwidth", "must be positive");
    if (!(b.subcarrier_spacing > 0.0))
        fail("subcarrier_spacing", "must be positive");
    if (b.bandwidth > 0.0 && b.subcarrier_spacing > 0.0)
    {
        const auto expected = std::llround(b.bandwidth / b.subcarrier_spacing);
        if (static_cast<long long>(b.num_subcarriers) != expected)
            fail("num_subcarriers", "must equal round(bandwidth / subcarrier_spacing) = " + std::to_string(expected));
    }
    if (b.num_tx < 1)
        fail("num_tx", "must be at least 1");
    if (b.num_rx < 1)
        fail("num_rx", "must be at least 1");
    if (b.num_tx >= 1 && b.num_subcarriers < b.num_tx)
        fail("num_subcarriers", "must be at least num_tx");
    if (!(b.antenna_spacing > 0.0))
        fail("antenna_spacing", "must be positive");
    if (!(b.cyclic_prefix > 0.0))
        fail("cyclic_prefix", "must be positive");
}

std::string describe(const std::vector<ConfigError> &errors)
{
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto &e : errors)
        os << "\n  " << e.field << ": " << e.message;
    return os.str();
}

BandConfig band_from_json(const nlohmann::json &j, const BandConfig &defaults)
{
    BandConfig b = defaults;
    b.carrier_frequency = j.value("carrier_frequency", defaults.carrier_frequency);
    b.bandwidth = j.value("bandwidth", defaults.bandwidth);
    b.subcarrier_spacing = j.value("subcarrier_spacing", defaults.subcarrier_spacing);
    b.num_tx = j.value("num_tx", defaults.num_tx);
    b.num_rx = j.value("num_rx", defaults.num_rx);
    b.cyclic_prefix = j.value("cyclic_prefix", defaults.cyclic_prefix);

    if (j.contains("wavelength"))
        b.wavelength = j.at("wavelength").get<double>();
    else if (j.contains("carrier_frequency") && b.carrier_frequency > 0.0)
        b.wavelength = speed_of_light / b.carrier_frequency;

    if (j.contains("num_subcarriers"))
        b.num_subcarriers = j.at("num_subcarriers").get<std::size_t>();
    else if (b.subcarrier_spacing > 0.0)
        b.num_subcarriers = static_cast<std::size_t>(std::llround(b.bandwidth / b.subcarrier_spacing));

    if (j.contains("antenna_spacing"))
        b.antenna_spacing = j.at("antenna_spacing").get<double>();
    else
        b.antenna_spacing = b.wavelength / 2.0;
    return b;
}

} // namespace

DualBandConfig DualBandConfig::reference()
{
    DualBandConfig cfg;
    cfg.sub6 = make_band(2.55e9, 0.1176, 20.16e6, 60e3, 8, 1.19e-6);
    cfg.mmw = make_band(25.5e9, 0.01176, 403.2e6, 120e3, 8, 0.59e-6);
    return cfg;
}

std::vector<ConfigError> validate_config(const DualBandConfig &cfg)
{
    std::vector<ConfigError> errors;
    validate_band(cfg.sub6, "sub6", errors);
    validate_band(cfg.mmw, "mmw", errors);
    if (!(cfg.k_scale > 0.0))
        errors.push_back({"k_scale", "must be positive"});
    if (!(cfg.total_tx_power > 0.0))
        errors.push_back({"total_tx_power", "must be positive"});
    if (!std::isfinite(cfg.sub6_snr_offset_db))
        errors.push_back({"sub6_snr_offset_db", "must be finite"});
    if (cfg.clusters.num_clusters < 1)
        errors.push_back({"channel.num_clusters", "must be at least 1"});
    if (!(cfg.clusters.rms_delay_spread > 0.0))
        errors.push_back({"channel.rms_delay_spread", "must be positive"});
    return errors;
}

ConfigException::ConfigException(std::vector<ConfigError> errors)
    : std::runtime_error(describe(errors)), errors_(std::move(errors))
{
}

void require_valid(const DualBandConfig &cfg)
{
    auto errors = validate_config(cfg);
    if (!errors.empty())
        throw ConfigException(std::move(errors));
}

void to_json(nlohmann::json &j, const BandConfig &b)
{
    j = nlohmann::json{{"carrier_frequency", b.carrier_frequency},
                       {"wavelength", b.wavelength},
                       {"bandwidth", b.bandwidth},
                       {"subcarrier_spacing", b.subcarrier_spacing},
                       {"num_subcarriers", b.num_subcarriers},
                       {"num_tx", b.num_tx},
                       {"num_rx", b.num_rx},
                       {"antenna_spacing", b.antenna_spacing},
                       {"cyclic_prefix", b.cyclic_prefix}};
}

void to_json(nlohmann::json &j, const DualBandConfig &cfg)
{
    j = nlohmann::json{{"sub6", cfg.sub6},
                       {"mmw", cfg.mmw},
                       {"k_scale", cfg.k_scale},
                       {"total_tx_power", cfg.total_tx_power},
                       {"sub6_snr_offset_db", cfg.sub6_snr_offset_db},
                       {"channel",
                        {{"num_clusters", cfg.clusters.num_clusters},
                         {"rms_delay_spread", cfg.clusters.rms_delay_spread}}}};
}

DualBandConfig config_from_json(const nlohmann::json &j)
{
    DualBandConfig cfg = DualBandConfig::reference();
    if (j.contains("sub6"))
        cfg.sub6 = band_from_json(j.at("sub6"), cfg.sub6);
    if (j.contains("mmw"))
        cfg.mmw = band_from_json(j.at("mmw"), cfg.mmw);
    cfg.k_scale = j.value("k_scale", cfg.k_scale);
    cfg.total_tx_power = j.value("total_tx_power", cfg.total_tx_power);
    cfg.sub6_snr_offset_db = j.value("sub6_snr_offset_db", cfg.sub6_snr_offset_db);
    if (j.contains("channel"))
    {
        const auto &c = j.at("channel");
        cfg.clusters.num_clusters = c.value("num_clusters", cfg.clusters.num_clusters);
        cfg.clusters.rms_delay_spread = c.value("rms_delay_spread", cfg.clusters.rms_delay_spread);
    }
    return cfg;
}

DualBandConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigException({{"config", "cannot open " + path.string()}});
    try
    {
        nlohmann::json j;
        in >> j;
        return config_from_json(j);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigException({{"config", path.string() + ": " + e.what()}});
    }
}

} // namespace dualband
