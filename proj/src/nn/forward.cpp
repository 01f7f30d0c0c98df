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
#include "dualband/nn.hpp"
#include "dualband/rng.hpp"

#include <cmath>

namespace dualband::nn
{

FeatureTensor assemble_input(const ComplexMatrix &inband, const ComplexMatrix *oob, double k_factor,
                             double noise_variance, double input_scale, std::size_t input_channels)
{
    const bool oob_layout = input_channels == 6;
    if (!oob_layout && input_channels != 4)
        throw std::invalid_argument("assemble_input: unsupported channel count " + std::to_string(input_channels));
    if (oob_layout && oob == nullptr)
        throw std::invalid_argument("assemble_input: 6-channel layout needs an out-of-band estimate");
    if (oob_layout && (oob->rows() != inband.rows() || oob->cols() != inband.cols()))
        throw std::invalid_argument("assemble_input: in-band and out-of-band estimates differ in shape");
    if (!(k_factor >= 0.0) || !(noise_variance >= 0.0))
        throw std::invalid_argument("assemble_input: K-factor and noise variance must be non-negative");

    const auto rows = static_cast<std::size_t>(inband.rows());
    const auto cols = static_cast<std::size_t>(inband.cols());
    FeatureTensor x(input_channels, rows, cols);
    const double k_feature = std::log10(1.0 + k_factor);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
        {
            const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
            x.at(0, i, j) = input_scale * inband(r, c).real();
            x.at(1, i, j) = input_scale * inband(r, c).imag();
            if (oob_layout)
            {
                x.at(2, i, j) = input_scale * (*oob)(r, c).real();
                x.at(3, i, j) = input_scale * (*oob)(r, c).imag();
                x.at(4, i, j) = input_scale * k_feature;
                x.at(5, i, j) = input_scale * noise_variance;
            }
            else
            {
                x.at(2, i, j) = input_scale * noise_variance;
                x.at(3, i, j) = 0.0;
            }
        }
    return x;
}

FeatureTensor assemble_input(const ModelPackage &model, const ComplexMatrix &inband, const ComplexMatrix *oob,
                             double k_factor, double noise_variance)
{
    if (static_cast<std::size_t>(inband.rows()) != model.rows || static_cast<std::size_t>(inband.cols()) != model.cols)
        throw ModelError(ModelErrorCode::shape_mismatch,
                         "channel is " + std::to_string(inband.rows()) + "x" + std::to_string(inband.cols()) +
                             ", model expects " + std::to_string(model.rows) + "x" + std::to_string(model.cols));
    return assemble_input(inband, model.variant == Variant::oob ? oob : nullptr, k_factor, noise_variance,
                          model.input_scale, model.input_channels);
}

FeatureTensor forward_features(const ModelPackage &model, const FeatureTensor &input)
{
    if (input.channels() != model.input_channels || input.height() != model.rows || input.width() != model.cols)
        throw ModelError(ModelErrorCode::shape_mismatch, "input tensor does not match the model input shape");
    std::vector<FeatureTensor> outputs;
    outputs.reserve(model.layers.size());
    const FeatureTensor *cur = &input;
    for (const auto &layer : model.layers)
    {
        FeatureTensor next;
        if (const auto *c = std::get_if<Conv2d>(&layer))
            next = conv2d(*cur, *c);
        else if (const auto *b = std::get_if<BatchNorm>(&layer))
            next = batch_norm_inference(*cur, *b);
        else if (std::holds_alternative<Relu>(layer))
            next = activation(*cur, Activation::relu);
        else if (std::holds_alternative<Tanh>(layer))
            next = activation(*cur, Activation::tanh);
        else if (std::holds_alternative<MaxPool2>(layer))
            next = maxpool2(*cur);
        else if (std::holds_alternative<Upsample2>(layer))
            next = upsample2(*cur);
        else if (const auto *s = std::get_if<ConcatSkip>(&layer))
        {
            if (s->source >= outputs.size())
                throw ModelError(ModelErrorCode::topology, "skip source refers to a later layer");
            next = concat_skip(*cur, outputs[s->source]);
        }
        outputs.push_back(std::move(next));
        cur = &outputs.back();
    }
    return *cur;
}

ComplexMatrix forward(const ModelPackage &model, const FeatureTensor &input)
{
    const FeatureTensor y = forward_features(model, input);
    if (y.channels() != 2)
        throw ModelError(ModelErrorCode::topology, "network output must have 2 channels");
    ComplexMatrix h(static_cast<Eigen::Index>(y.height()), static_cast<Eigen::Index>(y.width()));
    for (std::size_t i = 0; i < y.height(); ++i)
        for (std::size_t j = 0; j < y.width(); ++j)
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                model.output_scale * cdouble(y.at(0, i, j), y.at(1, i, j));
    return h;
}

ChannelTensor estimate_all_subcarriers(const ModelPackage &model, const ChannelTensor &inband, const ChannelTensor *oob,
                                       double k_factor, double noise_variance,
                                       const std::vector<std::size_t> *subcarriers)
{
    const bool needs_oob = model.variant == Variant::oob;
    if (needs_oob && (oob == nullptr || !oob->same_shape(inband)))
        throw std::invalid_argument("estimate_all_subcarriers: out-of-band estimate missing or mis-shaped");
    std::vector<std::size_t> all;
    if (subcarriers == nullptr)
    {
        all.resize(inband.size());
        for (std::size_t n = 0; n < all.size(); ++n)
            all[n] = n;
        subcarriers = &all;
    }
    ChannelTensor out(subcarriers->size(), inband.rows(), inband.cols());
    for (std::size_t i = 0; i < subcarriers->size(); ++i)
    {
        const std::size_t n = (*subcarriers)[i];
        if (n >= inband.size())
            throw std::out_of_range("estimate_all_subcarriers: subcarrier index out of range");
        const ComplexMatrix h_in = inband[n];
        ComplexMatrix h_oob;
        if (needs_oob)
            h_oob = (*oob)[n];
        const auto x = assemble_input(model, h_in, needs_oob ? &h_oob : nullptr, k_factor, noise_variance);
        out.set(i, forward(model, x));
    }
    return out;
}

namespace
{

Conv2d conv3(std::size_t in, std::size_t out)
{
    Conv2d c;
    c.in_channels = in;
    c.out_channels = out;
    c.kernel = 3;
    c.padding = 1;
    c.weight.assign(out * in * 9, 0.0);
    c.bias.assign(out, 0.0);
    return c;
}

BatchNorm bn(std::size_t channels)
{
    BatchNorm b;
    b.channels = channels;
    b.gamma.assign(channels, 1.0);
    b.beta.assign(channels, 0.0);
    b.mean.assign(channels, 0.0);
    b.variance.assign(channels, 1.0);
    return b;
}

void block(std::vector<Layer> &layers, std::size_t in, std::size_t out)
{
    layers.emplace_back(conv3(in, out));
    layers.emplace_back(Relu{});
    layers.emplace_back(bn(out));
}

ModelPackage base_package(Architecture arch, Variant variant, std::size_t rows, std::size_t cols)
{
    ModelPackage m;
    m.architecture = arch;
    m.variant = variant;
    m.input_channels = variant == Variant::oob ? 6 : 4;
    m.rows = rows;
    m.cols = cols;
    return m;
}

} // namespace

ModelPackage make_cnn(Variant variant, std::size_t rows, std::size_t cols, std::size_t width, std::size_t hidden_layers)
{
    if (width == 0 || hidden_layers == 0)
        throw std::invalid_argument("make_cnn: width and layer count must be positive");
    auto m = base_package(Architecture::cnn, variant, rows, cols);
    std::size_t in = m.input_channels;
    for (std::size_t l = 0; l < hidden_layers; ++l)
    {
        block(m.layers, in, width);
        in = width;
    }
    m.layers.emplace_back(conv3(in, 2));
    m.layers.emplace_back(Tanh{});
    validate_model(m);
    return m;
}

ModelPackage make_unet(Variant variant, std::size_t rows, std::size_t cols, std::size_t base_width)
{
    if (rows % 4 || cols % 4 || rows == 0 || cols == 0)
        throw std::invalid_argument("make_unet: antenna dimensions must be positive multiples of 4");
    if (base_width == 0)
        throw std::invalid_argument("make_unet: base width must be positive");
    auto m = base_package(Architecture::unet, variant, rows, cols);
    const std::size_t w1 = base_width, w2 = 2 * base_width;
    auto &L = m.layers;

    block(L, m.input_channels, w1);
    for (int i = 0; i < 4; ++i)
        block(L, w1, w1);
    const std::size_t enc1 = L.size() - 1;
    L.emplace_back(MaxPool2{});

    block(L, w1, w2);
    for (int i = 0; i < 4; ++i)
        block(L, w2, w2);
    const std::size_t enc2 = L.size() - 1;
    L.emplace_back(MaxPool2{});

    L.emplace_back(Upsample2{});
    block(L, w2, w2);
    L.emplace_back(ConcatSkip{enc2});
    block(L, 2 * w2, w2);
    for (int i = 0; i < 3; ++i)
        block(L, w2, w2);

    L.emplace_back(Upsample2{});
    block(L, w2, w1);
    L.emplace_back(ConcatSkip{enc1});
    block(L, 2 * w1, w1);
    for (int i = 0; i < 3; ++i)
        block(L, w1, w1);

    L.emplace_back(conv3(w1, 2));
    L.emplace_back(Tanh{});
    validate_model(m);
    return m;
}

void randomize_parameters(ModelPackage &model, std::uint64_t seed)
{
    RngStream rng(seed);
    for (auto &layer : model.layers)
    {
        if (auto *c = std::get_if<Conv2d>(&layer))
        {
            const double scale = std::sqrt(2.0 / static_cast<double>(c->in_channels * c->kernel * c->kernel));
            for (double &w : c->weight)
                w = scale * rng.normal();
            for (double &b : c->bias)
                b = 0.1 * rng.normal();
        }
        else if (auto *b = std::get_if<BatchNorm>(&layer))
        {
            for (std::size_t i = 0; i < b->channels; ++i)
            {
                b->gamma[i] = rng.uniform(0.5, 1.5);
                b->beta[i] = 0.1 * rng.normal();
                b->mean[i] = 0.1 * rng.normal();
                b->variance[i] = rng.uniform(0.5, 2.0);
            }
        }
    }
}

} // namespace dualband::nn
