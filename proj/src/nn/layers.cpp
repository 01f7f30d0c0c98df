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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace dualband::nn
{

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

FeatureTensor::FeatureTensor(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : channels_(channels), height_(height), width_(width), values_(channels * height * width, fill)
{
    if (channels == 0 || height == 0 || width == 0)
        throw std::invalid_argument("FeatureTensor: every dimension must be at least 1");
}

std::string layer_kind(const Layer &layer)
{
    struct Visitor
    {
        std::string operator()(const Conv2d &) const { return "conv"; }
        std::string operator()(const BatchNorm &) const { return "batchnorm"; }
        std::string operator()(const Relu &) const { return "relu"; }
        std::string operator()(const Tanh &) const { return "tanh"; }
        std::string operator()(const MaxPool2 &) const { return "maxpool2"; }
        std::string operator()(const Upsample2 &) const { return "upsample2"; }
        std::string operator()(const ConcatSkip &) const { return "concat_skip"; }
    };
    return std::visit(Visitor{}, layer);
}

FeatureTensor conv2d(const FeatureTensor &x, const Conv2d &spec)
{
    if (x.channels() != spec.in_channels)
        throw std::invalid_argument("conv2d: input has " + std::to_string(x.channels()) + " channels, layer expects " +
                                    std::to_string(spec.in_channels));
    if (spec.weight.size() != spec.out_channels * spec.in_channels * spec.kernel * spec.kernel ||
        spec.bias.size() != spec.out_channels)
        throw std::invalid_argument("conv2d: parameter sizes do not match the layer shape");
    const auto k = static_cast<std::ptrdiff_t>(spec.kernel);
    const auto p = static_cast<std::ptrdiff_t>(spec.padding);
    const auto h = static_cast<std::ptrdiff_t>(x.height());
    const auto w = static_cast<std::ptrdiff_t>(x.width());
    const std::ptrdiff_t oh = h + 2 * p - k + 1;
    const std::ptrdiff_t ow = w + 2 * p - k + 1;
    if (oh < 1 || ow < 1)
        throw std::invalid_argument("conv2d: kernel larger than padded input");

    const auto patch = static_cast<Eigen::Index>(spec.in_channels) * k * k;
    RowMajorMatrix cols = RowMajorMatrix::Zero(patch, oh * ow);
    for (std::size_t c = 0; c < spec.in_channels; ++c)
        for (std::ptrdiff_t ki = 0; ki < k; ++ki)
            for (std::ptrdiff_t kj = 0; kj < k; ++kj)
            {
                const auto row = (static_cast<std::ptrdiff_t>(c) * k + ki) * k + kj;
                for (std::ptrdiff_t i = 0; i < oh; ++i)
                {
                    const std::ptrdiff_t si = i + ki - p;
                    if (si < 0 || si >= h)
                        continue;
                    for (std::ptrdiff_t j = 0; j < ow; ++j)
                    {
                        const std::ptrdiff_t sj = j + kj - p;
                        if (sj >= 0 && sj < w)
                            cols(row, i * ow + j) = x.at(c, static_cast<std::size_t>(si), static_cast<std::size_t>(sj));
                    }
                }
            }

    Eigen::Map<const RowMajorMatrix> weight(spec.weight.data(), static_cast<Eigen::Index>(spec.out_channels), patch);
    Eigen::Map<const Eigen::VectorXd> bias(spec.bias.data(), static_cast<Eigen::Index>(spec.out_channels));

    FeatureTensor out(spec.out_channels, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow));
    Eigen::Map<RowMajorMatrix> result(out.values().data(), static_cast<Eigen::Index>(spec.out_channels), oh * ow);
    result.noalias() = weight * cols;
    result.colwise() += bias;
    return out;
}

FeatureTensor batch_norm_inference(const FeatureTensor &x, const BatchNorm &spec)
{
    if (x.channels() != spec.channels)
        throw std::invalid_argument("batch_norm_inference: channel count mismatch");
    if (spec.gamma.size() != spec.channels || spec.beta.size() != spec.channels || spec.mean.size() != spec.channels ||
        spec.variance.size() != spec.channels)
        throw std::invalid_argument("batch_norm_inference: parameter sizes do not match channel count");
    FeatureTensor out = x;
    const std::size_t plane = x.plane_size();
    for (std::size_t c = 0; c < spec.channels; ++c)
    {
        if (spec.variance[c] < 0.0)
            throw std::invalid_argument("batch_norm_inference: negative running variance");
        const double scale = spec.gamma[c] / std::sqrt(spec.variance[c] + spec.epsilon);
        const double shift = spec.beta[c] - scale * spec.mean[c];
        for (std::size_t i = 0; i < plane; ++i)
        {
            double &v = out.values()[c * plane + i];
            v = scale * v + shift;
        }
    }
    return out;
}

FeatureTensor activation(const FeatureTensor &x, Activation kind)
{
    FeatureTensor out = x;
    if (kind == Activation::relu)
        std::for_each(out.values().begin(), out.values().end(), [](double &v) { v = std::max(0.0, v); });
    else
        std::for_each(out.values().begin(), out.values().end(), [](double &v) { v = std::tanh(v); });
    return out;
}

FeatureTensor maxpool2(const FeatureTensor &x)
{
    if (x.height() % 2 != 0 || x.width() % 2 != 0)
        throw std::invalid_argument("maxpool2: spatial dimensions must be even");
    FeatureTensor out(x.channels(), x.height() / 2, x.width() / 2);
    for (std::size_t c = 0; c < x.channels(); ++c)
        for (std::size_t i = 0; i < out.height(); ++i)
            for (std::size_t j = 0; j < out.width(); ++j)
                out.at(c, i, j) = std::max({x.at(c, 2 * i, 2 * j), x.at(c, 2 * i, 2 * j + 1), x.at(c, 2 * i + 1, 2 * j),
                                            x.at(c, 2 * i + 1, 2 * j + 1)});
    return out;
}

FeatureTensor upsample2(const FeatureTensor &x)
{
    FeatureTensor out(x.channels(), x.height() * 2, x.width() * 2);
    for (std::size_t c = 0; c < out.channels(); ++c)
        for (std::size_t i = 0; i < out.height(); ++i)
            for (std::size_t j = 0; j < out.width(); ++j)
                out.at(c, i, j) = x.at(c, i / 2, j / 2);
    return out;
}

FeatureTensor concat_skip(const FeatureTensor &decoder, const FeatureTensor &encoder)
{
    if (decoder.height() != encoder.height() || decoder.width() != encoder.width())
        throw std::invalid_argument("concat_skip: spatial dimensions differ");
    FeatureTensor out(decoder.channels() + encoder.channels(), decoder.height(), decoder.width());
    std::copy(decoder.values().begin(), decoder.values().end(), out.values().begin());
    std::copy(encoder.values().begin(), encoder.values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(decoder.values().size()));
    return out;
}

} // namespace dualband::nn
