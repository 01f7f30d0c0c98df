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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace dualband;

namespace
{

bool has_field(const std::vector<ConfigError> &errors, const std::string &field)
{
    return std::any_of(errors.begin(), errors.end(), [&](const ConfigError &e) { return e.field == field; });
}

} // namespace

TEST_CASE("reference configuration is valid and derives the subcarrier counts", "[config]")
{
    const auto cfg = DualBandConfig::reference();
    CHECK(validate_config(cfg).empty());
    CHECK(cfg.sub6.num_subcarriers == 336);
    CHECK(cfg.mmw.num_subcarriers == 3360);
    CHECK(cfg.sub6.num_tx == 8);
    CHECK(cfg.mmw.num_rx == 8);
    CHECK(cfg.sub6.spacing_in_wavelengths() == Catch::Approx(0.5));
    CHECK(cfg.mmw.spacing_in_wavelengths() == Catch::Approx(0.5));
    CHECK(cfg.k_scale == 1.0);
    CHECK(cfg.total_tx_power == 1.0);
    CHECK_NOTHROW(require_valid(cfg));
}

TEST_CASE("validation names the violated fields", "[config]")
{
    auto cfg = DualBandConfig::reference();
    cfg.mmw.num_tx = 0;
    auto errors = validate_config(cfg);
    CHECK(has_field(errors, "mmw.num_tx"));

    cfg = DualBandConfig::reference();
    cfg.k_scale = -1.0;
    CHECK(has_field(validate_config(cfg), "k_scale"));

    cfg = DualBandConfig::reference();
    cfg.sub6.wavelength *= 1.01;
    CHECK(has_field(validate_config(cfg), "sub6.wavelength"));

    cfg = DualBandConfig::reference();
    cfg.sub6.num_subcarriers = 335;
    CHECK(has_field(validate_config(cfg), "sub6.num_subcarriers"));

    cfg = DualBandConfig::reference();
    cfg.mmw.antenna_spacing = 0.0;
    cfg.total_tx_power = 0.0;
    errors = validate_config(cfg);
    CHECK(has_field(errors, "mmw.antenna_spacing"));
    CHECK(has_field(errors, "total_tx_power"));
    CHECK_THROWS_AS(require_valid(cfg), ConfigException);
}

TEST_CASE("fewer subcarriers than transmit antennas is rejected", "[config]")
{
    auto cfg = DualBandConfig::reference();
    cfg.sub6.bandwidth = 4 * cfg.sub6.subcarrier_spacing;
    cfg.sub6.num_subcarriers = 4;
    CHECK(has_field(validate_config(cfg), "sub6.num_subcarriers"));
}

TEST_CASE("JSON round trip and defaults", "[config]")
{
    const auto ref = DualBandConfig::reference();
    nlohmann::json j;
    to_json(j, ref);
    const auto back = config_from_json(j);
    CHECK(back.mmw.num_subcarriers == ref.mmw.num_subcarriers);
    CHECK(back.sub6.wavelength == ref.sub6.wavelength);
    CHECK(back.clusters.num_clusters == ref.clusters.num_clusters);
    CHECK(back.sub6_snr_offset_db == ref.sub6_snr_offset_db);

    const auto partial = config_from_json(nlohmann::json::parse(R"({"mmw": {"num_tx": 4, "num_rx": 4}, "k_scale": 2})"));
    CHECK(partial.mmw.num_tx == 4);
    CHECK(partial.mmw.num_subcarriers == 3360);
    CHECK(partial.k_scale == 2.0);
    CHECK(validate_config(partial).empty());

    // A new carrier without explicit wavelength gets c / f and half-wavelength spacing.
    const auto moved = config_from_json(nlohmann::json::parse(R"({"mmw": {"carrier_frequency": 28e9}})"));
    CHECK(moved.mmw.wavelength == Catch::Approx(speed_of_light / 28e9));
    CHECK(moved.mmw.antenna_spacing == Catch::Approx(moved.mmw.wavelength / 2));
    CHECK(validate_config(moved).empty());
}

TEST_CASE("load_config reports malformed files as configuration errors", "[config]")
{
    const auto dir = std::filesystem::temp_directory_path() / "dualband_test_config";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "bad.json") << "{ not json";
        std::ofstream(dir / "wrongtype.json") << R"({"mmw": {"num_tx": "eight"}})";
        std::ofstream(dir / "ok.json") << R"({"channel": {"num_clusters": 5}})";
    }
    CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigException);
    CHECK_THROWS_AS(load_config(dir / "wrongtype.json"), ConfigException);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigException);
    CHECK(load_config(dir / "ok.json").clusters.num_clusters == 5);
    std::filesystem::remove_all(dir);
}
