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
#include "dualband/pipeline.hpp"

#include "dualband/metrics.hpp"
#include "dualband/pilot_training.hpp"
#include "dualband/precoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace dualband
{

EstimateBundle run_training_phase(const DualBandConfig &cfg, const ChannelRealization &realization, RngStream &noise)
{
    const auto &s = realization.scenario;
    if (!(s.snr_mmw > 0.0) || !(s.snr_sub6 > 0.0))
        throw std::invalid_argument("run_training_phase: SNR must be positive");
    EstimateBundle b;
    const double noise_sub6 = 1.0 / s.snr_sub6;
    b.noise_variance = 1.0 / s.snr_mmw;

    const PilotGrid grid_sub6 = allocate_pilots(cfg.sub6);
    b.inband_sub6 =
        ls_estimate_interpolate(simulate_training_step1(realization.h_sub6, grid_sub6, noise_sub6, noise), grid_sub6);
    b.angles = estimate_angles(b.inband_sub6, cfg.sub6.spacing_in_wavelengths());
    b.k_factor = estimate_k_factor(b.inband_sub6);

    const PilotGrid grid_mmw = allocate_pilots(cfg.mmw);
    b.inband =
        ls_estimate_interpolate(simulate_training_step1(realization.h_mmw, grid_mmw, b.noise_variance, noise), grid_mmw);

    const ComplexVector y = simulate_training_step2(cfg.mmw, realization.h_mmw, b.angles.aod, b.angles.aoa,
                                                    b.noise_variance, noise);
    const auto gain = estimate_beamformed_gain(y, b.angles.aod, b.angles.aoa);
    b.oob = reconstruct_oob_estimate(cfg.mmw, los_delay_filter(gain.gain), b.angles.aod, b.angles.aoa);
    return b;
}

const std::vector<std::string> &known_methods()
{
    static const std::vector<std::string> tags{method::perfect,    method::non_ml,  method::mrc,
                                               method::cnn_inband, method::unet_inband, method::cnn_oob,
                                               method::unet_oob};
    return tags;
}

bool is_known_method(const std::string &tag)
{
    const auto &all = known_methods();
    return std::find(all.begin(), all.end(), tag) != all.end();
}

bool is_nn_method(const std::string &tag)
{
    return tag == method::cnn_inband || tag == method::unet_inband || tag == method::cnn_oob ||
           tag == method::unet_oob;
}

MethodSet load_methods(const std::vector<std::string> &tags, const std::filesystem::path &models_dir,
                       const DualBandConfig &cfg)
{
    MethodSet out;
    for (const auto &tag : tags)
    {
        if (!is_known_method(tag))
            throw std::invalid_argument("unknown method '" + tag + "'");
        if (std::find(out.tags.begin(), out.tags.end(), tag) != out.tags.end())
            continue;
        if (!is_nn_method(tag))
        {
            out.tags.push_back(tag);
            continue;
        }
        const auto manifest = models_dir / (tag + ".json");
        if (models_dir.empty() || !std::filesystem::exists(manifest))
        {
            out.warnings.push_back("method " + tag + " skipped: no model at " + manifest.string());
            continue;
        }
        try
        {
            auto model = nn::load_model(manifest, nn::RuntimeShape{cfg.mmw.num_rx, cfg.mmw.num_tx});
            const bool want_oob = tag == method::cnn_oob || tag == method::unet_oob;
            const bool want_unet = tag == method::unet_inband || tag == method::unet_oob;
            if ((model.variant == nn::Variant::oob) != want_oob ||
                (model.architecture == nn::Architecture::unet) != want_unet)
            {
                out.warnings.push_back("method " + tag + " skipped: " + manifest.string() + " holds a " +
                                       nn::to_string(model.architecture) + "/" + nn::to_string(model.variant) +
                                       " model");
                continue;
            }
            out.models.emplace(tag, std::move(model));
            out.tags.push_back(tag);
        }
        catch (const nn::ModelError &e)
        {
            out.warnings.push_back("method " + tag + " skipped: " + e.what());
        }
    }
    return out;
}

ChannelTensor apply_method(const std::string &tag, const MethodSet &methods, const EstimateBundle &bundle,
                           const ChannelTensor &truth, const DualBandConfig &cfg,
                           const std::vector<std::size_t> &subcarriers)
{
    if (tag == method::perfect)
        return baseline_perfect(truth.select(subcarriers)).h;
    if (tag == method::non_ml)
        return baseline_inband(bundle.inband.select(subcarriers)).h;
    if (tag == method::mrc)
    {
        const double w = mrc_weight(bundle.k_factor, bundle.noise_variance, cfg);
        return mrc_combine(bundle.oob.select(subcarriers), bundle.inband.select(subcarriers), w).h;
    }
    const auto it = methods.models.find(tag);
    if (it == methods.models.end())
        throw std::invalid_argument("apply_method: no model loaded for '" + tag + "'");
    return nn::estimate_all_subcarriers(it->second, bundle.inband, &bundle.oob, bundle.k_factor,
                                        bundle.noise_variance, &subcarriers);
}

std::vector<std::size_t> strided_subcarriers(std::size_t n, std::size_t stride)
{
    if (stride == 0)
        throw std::invalid_argument("subcarrier stride must be at least 1");
    std::vector<std::size_t> out;
    out.reserve(n / stride + 1);
    for (std::size_t k = 0; k < n; k += stride)
        out.push_back(k);
    return out;
}

std::vector<IdealLink> ideal_links(const ChannelTensor &truth, double noise_variance, double total_power)
{
    std::vector<IdealLink> out;
    out.reserve(truth.size());
    for (std::size_t n = 0; n < truth.size(); ++n)
        out.push_back(ideal_link(truth[n], noise_variance, total_power));
    return out;
}

double evaluate_se(const ChannelTensor &estimate, const ChannelTensor &truth, const std::vector<IdealLink> &ideals,
                   double noise_variance, double total_power)
{
    if (!estimate.same_shape(truth) || ideals.size() != truth.size())
        throw std::invalid_argument("evaluate_se: estimate, truth and ideal links differ in size");
    std::vector<RealVector> sinrs;
    sinrs.reserve(truth.size());
    for (std::size_t n = 0; n < truth.size(); ++n)
        sinrs.push_back(evaluate_link(estimate[n], truth[n], ideals[n], noise_variance, total_power).sinr);
    return spectral_efficiency(sinrs);
}

double evaluate_se(const ChannelTensor &estimate, const ChannelTensor &truth, double noise_variance,
                   double total_power)
{
    return evaluate_se(estimate, truth, ideal_links(truth, noise_variance, total_power), noise_variance,
                       total_power);
}

} // namespace dualband
