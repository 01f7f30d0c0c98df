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

#include "dualband/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dualband::nn
{

// Real-valued channels x height x width activation, row-major within each channel.
class FeatureTensor
{
public:
    FeatureTensor() = default;
    FeatureTensor(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);

    [[nodiscard]] std::size_t channels() const { return channels_; }
    [[nodiscard]] std::size_t height() const { return height_; }
    [[nodiscard]] std::size_t width() const { return width_; }
    [[nodiscard]] std::size_t plane_size() const { return height_ * width_; }

    double &at(std::size_t c, std::size_t i, std::size_t j) { return values_[(c * height_ + i) * width_ + j]; }
    [[nodiscard]] double at(std::size_t c, std::size_t i, std::size_t j) const
    {
        return values_[(c * height_ + i) * width_ + j];
    }

    std::vector<double> &values() { return values_; }
    [[nodiscard]] const std::vector<double> &values() const { return values_; }

    bool operator==(const FeatureTensor &) const = default;

private:
    std::size_t channels_ = 0;
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<double> values_;
};

struct Conv2d
{
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 1;
    std::size_t padding = 0;
    std::vector<double> weight; // [out, in, kh, kw]
    std::vector<double> bias;   // [out]

    [[nodiscard]] std::size_t parameter_count() const
    {
        return out_channels * in_channels * kernel * kernel + out_channels;
    }
};

struct BatchNorm
{
    std::size_t channels = 0;
    double epsilon = 1e-5;
    std::vector<double> gamma, beta, mean, variance;

    [[nodiscard]] std::size_t parameter_count() const { return 4 * channels; }
};

struct Relu
{
};
struct Tanh
{
};
struct MaxPool2
{
};
struct Upsample2
{
};
// Concatenates the output of layer `source` (0-based index into the layer list) after the
// current activation's channels.
struct ConcatSkip
{
    std::size_t source = 0;
};

using Layer = std::variant<Conv2d, BatchNorm, Relu, Tanh, MaxPool2, Upsample2, ConcatSkip>;

std::string layer_kind(const Layer &layer);

// Single-layer operations.
FeatureTensor conv2d(const FeatureTensor &x, const Conv2d &spec);
FeatureTensor batch_norm_inference(const FeatureTensor &x, const BatchNorm &spec);
enum class Activation
{
    relu,
    tanh
};
FeatureTensor activation(const FeatureTensor &x, Activation kind);
FeatureTensor maxpool2(const FeatureTensor &x);
FeatureTensor upsample2(const FeatureTensor &x);
FeatureTensor concat_skip(const FeatureTensor &decoder, const FeatureTensor &encoder);

enum class Architecture
{
    cnn,
    unet
};
enum class Variant
{
    oob,
    inband
};

std::string to_string(Architecture a);
std::string to_string(Variant v);

struct ModelPackage
{
    Architecture architecture = Architecture::cnn;
    Variant variant = Variant::oob;
    std::size_t input_channels = 6;
    std::size_t rows = 0; // M_Rx the model was trained for
    std::size_t cols = 0; // M_Tx
    double input_scale = 1.0;
    double output_scale = 1.0;
    std::vector<Layer> layers;
};

enum class ModelErrorCode
{
    io,
    parse,
    checksum_mismatch,
    size_mismatch,
    shape_mismatch,
    unknown_layer,
    topology
};

std::string to_string(ModelErrorCode code);

class ModelError : public std::runtime_error
{
public:
    ModelError(ModelErrorCode code, const std::string &what);
    [[nodiscard]] ModelErrorCode code() const { return code_; }

private:
    ModelErrorCode code_;
};

// Shape inference over the layer graph; throws ModelError(topology / shape_mismatch) on any
// inconsistency so that forward() never fails half-way.
void validate_model(const ModelPackage &model);

struct RuntimeShape
{
    std::size_t rows;
    std::size_t cols;
};

// Reads `<manifest>.json` and the blob it names. Checks, in order: manifest syntax and layer
// kinds, blob size against the declared parameter counts, CRC-32 checksum, topology, and the
// runtime antenna shape when given.
ModelPackage load_model(const std::filesystem::path &manifest, std::optional<RuntimeShape> runtime = std::nullopt);

// Writes the manifest and a `<stem>.bin` blob next to it (float32 little-endian).
void save_model(const ModelPackage &model, const std::filesystem::path &manifest);

std::uint32_t crc32_of(const std::vector<unsigned char> &bytes);

// [Re H~, Im H~, Re H^, Im H^, log10(1 + K~), sigma^2] for the oob variant and
// [Re H~, Im H~, sigma^2, 0] for the in-band variant; every channel multiplied by s_in.
FeatureTensor assemble_input(const ComplexMatrix &inband, const ComplexMatrix *oob, double k_factor,
                             double noise_variance, double input_scale, std::size_t input_channels);
FeatureTensor assemble_input(const ModelPackage &model, const ComplexMatrix &inband, const ComplexMatrix *oob,
                             double k_factor, double noise_variance);

// Raw 2-channel network output (before output scaling).
FeatureTensor forward_features(const ModelPackage &model, const FeatureTensor &input);

// Network output scaled by s_out and recombined into Re + j Im.
ComplexMatrix forward(const ModelPackage &model, const FeatureTensor &input);

// Independent per-subcarrier application. `oob` may be null for the in-band variant; when
// `subcarriers` is given only those indices are evaluated (output in that order).
ChannelTensor estimate_all_subcarriers(const ModelPackage &model, const ChannelTensor &inband,
                                       const ChannelTensor *oob, double k_factor, double noise_variance,
                                       const std::vector<std::size_t> *subcarriers = nullptr);

// Reference architectures with zero-initialised parameters (BN: gamma 1, variance 1).
ModelPackage make_cnn(Variant variant, std::size_t rows, std::size_t cols, std::size_t width = 64,
                      std::size_t hidden_layers = 9);
ModelPackage make_unet(Variant variant, std::size_t rows, std::size_t cols, std::size_t base_width = 32);

// Fills every conv/BN parameter with seeded random values (He-style scale for convs).
void randomize_parameters(ModelPackage &model, std::uint64_t seed);

} // namespace dualband::nn
