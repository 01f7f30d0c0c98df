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
#include "dualband/dataset.hpp"
#include "dualband/metrics.hpp"
#include "dualband/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace dualband
{

struct ParameterRange
{
    double lo = 0.0;
    double hi = 0.0;
};

// Uniform draw ranges; SNR and K in dB, angles in degrees.
struct DrawRanges
{
    ParameterRange snr_db{-20.0, 10.0};
    ParameterRange k_db{-20.0, 30.0};
    ParameterRange angle_deg{-90.0, 90.0};
};

// "snr_db=-20:10,k_db=-20:30,angle_deg=-90:90"; omitted keys keep their defaults.
DrawRanges parse_ranges(const std::string &text);
void validate_ranges(const DrawRanges &ranges);

// Scenario parameters of one randomly drawn link.
struct DrawnParameters
{
    double snr_db = 0.0;
    double k_db = 0.0;
    double aod = 0.0; // rad
    double aoa = 0.0; // rad
    double phase_sub6 = 0.0;
    double phase_mmw = 0.0;
};

// SNR, K (both uniform in dB), AoD, AoA and the two LOS phases, in that draw order.
DrawnParameters draw_parameters(const DrawRanges &ranges, RngStream &rng);

struct CdfSettings
{
    std::size_t samples = 2000;
    DrawRanges ranges;
};

struct ExperimentPlan
{
    std::vector<std::string> methods{"perfect", "non_ml", "mrc", "cnn_inband", "unet_inband", "cnn_oob", "unet_oob"};
    std::vector<double> snr_db{-20.0, -15.0, -10.0, -5.0, 0.0, 5.0, 10.0};
    std::vector<double> k_db{-20.0, 10.0, 20.0};
    std::size_t realizations = 100;
    std::uint64_t seed = 1;
    ParameterRange angle_deg{-90.0, 90.0};
    std::size_t subcarrier_stride = 1; // SE/NMSE evaluated on every stride-th subcarrier
    DualBandConfig config = DualBandConfig::reference();
    CdfSettings cdf;
};

// Missing keys keep the defaults above. A "config" entry may be an object or a path
// relative to `base_dir`. Throws ConfigException on invalid values.
ExperimentPlan plan_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path &path);
nlohmann::ordered_json plan_to_json(const ExperimentPlan &plan);
void validate_plan(const ExperimentPlan &plan);

struct RunOptions
{
    std::filesystem::path models_dir;
    std::size_t workers = 1;
};

struct RunResult
{
    std::vector<MetricRecord> records;
    std::vector<std::string> warnings;
};

// For every (K, SNR, realization) one channel and training phase, shared by all methods.
// The channel and the unit-variance noise draws depend only on (seed, K index, realization),
// so neighbouring SNR cells see the same links. Records are ordered K, SNR, realization, method.
RunResult run_nmse_sweep(const ExperimentPlan &plan, const RunOptions &options);

// `plan.cdf.samples` links drawn from `plan.cdf.ranges`; one SE record per sample and method.
RunResult run_se_cdf(const ExperimentPlan &plan, const RunOptions &options);

std::string config_hash(const DualBandConfig &cfg);

// Draws `count` links from `ranges`, runs the full training phase, and writes the central-
// subcarrier sample of each, in index order.
void generate_dataset(const DualBandConfig &cfg, const DrawRanges &ranges, std::size_t count, std::uint64_t seed,
                      const std::filesystem::path &path, std::size_t workers = 1);

// Runs task(i) for i in [0, count) on `workers` threads. The first exception is rethrown after
// all threads stop.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)> &task);

// DUALBAND_WORKERS if set and positive, else the hardware concurrency (at least 1).
std::size_t default_workers();

} // namespace dualband
