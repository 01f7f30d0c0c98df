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

#include "dualband/channel_model.hpp"
#include "dualband/config.hpp"
#include "dualband/estimators.hpp"
#include "dualband/nn.hpp"
#include "dualband/precoding.hpp"
#include "dualband/rng.hpp"
#include "dualband/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dualband
{

// Everything the training phase hands to the estimation methods for one realization.
struct EstimateBundle
{
    ChannelTensor inband_sub6; // H~(s)
    ChannelTensor inband;      // H~(m)
    ChannelTensor oob;         // H^(m)
    AngleEstimate angles;      // from H~(s)
    double k_factor = 0.0;     // K~(s)
    double noise_variance = 0.0; // sigma_w^2 of the mmWave band
};

// Both training steps on a generated realization: comb-pilot LS on each band, angle and K
// estimation on the sub-6 estimate, then the beamformed mmWave step and reconstruction.
// Noise is drawn from `noise` only, with a fixed number of draws for a given configuration.
EstimateBundle run_training_phase(const DualBandConfig &cfg, const ChannelRealization &realization,
                                  RngStream &noise);

namespace method
{
inline constexpr const char *perfect = "perfect";
inline constexpr const char *non_ml = "non_ml";
inline constexpr const char *mrc = "mrc";
inline constexpr const char *cnn_inband = "cnn_inband";
inline constexpr const char *unet_inband = "unet_inband";
inline constexpr const char *cnn_oob = "cnn_oob";
inline constexpr const char *unet_oob = "unet_oob";
} // namespace method

const std::vector<std::string> &known_methods();
bool is_known_method(const std::string &tag);
bool is_nn_method(const std::string &tag);

// Methods that can actually be evaluated plus the models they need. NN methods whose
// `<models_dir>/<tag>.json` is missing or fails to load are dropped with a warning.
struct MethodSet
{
    std::vector<std::string> tags;
    std::map<std::string, nn::ModelPackage> models;
    std::vector<std::string> warnings;
};

MethodSet load_methods(const std::vector<std::string> &tags, const std::filesystem::path &models_dir,
                       const DualBandConfig &cfg);

// Estimate of the mmWave channel on the given subcarriers (in that order).
ChannelTensor apply_method(const std::string &tag, const MethodSet &methods, const EstimateBundle &bundle,
                           const ChannelTensor &truth, const DualBandConfig &cfg,
                           const std::vector<std::size_t> &subcarriers);

// 0, stride, 2 stride, ... below n; stride 1 selects every subcarrier.
std::vector<std::size_t> strided_subcarriers(std::size_t n, std::size_t stride);

// Subcarrier-averaged sum rate of precoders designed on `estimate` and applied to `truth`.
// Both tensors hold the same subcarriers.
double evaluate_se(const ChannelTensor &estimate, const ChannelTensor &truth, double noise_variance,
                   double total_power);

// Same, reusing the per-subcarrier ideal links of `truth` across methods.
std::vector<IdealLink> ideal_links(const ChannelTensor &truth, double noise_variance, double total_power);
double evaluate_se(const ChannelTensor &estimate, const ChannelTensor &truth, const std::vector<IdealLink> &ideals,
                   double noise_variance, double total_power);

} // namespace dualband
