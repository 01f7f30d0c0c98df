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

#include <nlohmann/json.hpp>
#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace dualband::nn
{

namespace
{

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

constexpr const char *format_name = "dualband-model";
constexpr int format_version = 1;

[[noreturn]] void fail(ModelErrorCode code, const std::string &msg) { throw ModelError(code, msg); }

std::size_t get_size(const nlohmann::json &j, const char *key)
{
    const auto &v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw std::runtime_error(std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

Architecture parse_architecture(const std::string &s)
{
    if (s == "cnn")
        return Architecture::cnn;
    if (s == "unet")
        return Architecture::unet;
    fail(ModelErrorCode::parse, "unknown architecture '" + s + "'");
}

Variant parse_variant(const std::string &s)
{
    if (s == "oob")
        return Variant::oob;
    if (s == "inband")
        return Variant::inband;
    fail(ModelErrorCode::parse, "unknown variant '" + s + "'");
}

std::string hex32(std::uint32_t v)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

void take(std::vector<double> &dst, std::size_t n, const std::vector<float> &blob, std::size_t &pos)
{
    dst.assign(blob.begin() + static_cast<std::ptrdiff_t>(pos), blob.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
}

void put(std::vector<float> &blob, const std::vector<double> &src)
{
    for (double v : src)
        blob.push_back(static_cast<float>(v));
}

} // namespace

std::string to_string(Architecture a) { return a == Architecture::cnn ? "cnn" : "unet"; }
std::string to_string(Variant v) { return v == Variant::oob ? "oob" : "inband"; }

std::string to_string(ModelErrorCode code)
{
    switch (code)
    {
    case ModelErrorCode::io:
        return "io";
    case ModelErrorCode::parse:
        return "parse";
    case ModelErrorCode::checksum_mismatch:
        return "checksum_mismatch";
    case ModelErrorCode::size_mismatch:
        return "size_mismatch";
    case ModelErrorCode::shape_mismatch:
        return "shape_mismatch";
    case ModelErrorCode::unknown_layer:
        return "unknown_layer";
    case ModelErrorCode::topology:
        return "topology";
    }
    return "unknown";
}

ModelError::ModelError(ModelErrorCode code, const std::string &what)
    : std::runtime_error(to_string(code) + ": " + what), code_(code)
{
}

std::uint32_t crc32_of(const std::vector<unsigned char> &bytes)
{
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks for very large blobs.
    std::size_t pos = 0;
    while (pos < bytes.size())
    {
        const std::size_t chunk = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
        crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(chunk));
        pos += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

void validate_model(const ModelPackage &model)
{
    const std::size_t expected_in = model.variant == Variant::oob ? 6 : 4;
    if (model.input_channels != expected_in)
        fail(ModelErrorCode::topology, "variant " + to_string(model.variant) + " requires " +
                                           std::to_string(expected_in) + " input channels, manifest declares " +
                                           std::to_string(model.input_channels));
    if (model.rows == 0 || model.cols == 0)
        fail(ModelErrorCode::topology, "model shape must be positive");
    if (model.layers.empty())
        fail(ModelErrorCode::topology, "model has no layers");

    struct Shape
    {
        std::size_t c, h, w;
    };
    std::vector<Shape> outputs;
    outputs.reserve(model.layers.size());
    Shape cur{model.input_channels, model.rows, model.cols};
    for (std::size_t i = 0; i < model.layers.size(); ++i)
    {
        const auto &layer = model.layers[i];
        const std::string where = "layer " + std::to_string(i) + " (" + layer_kind(layer) + ")";
        if (const auto *c = std::get_if<Conv2d>(&layer))
        {
            if (c->in_channels != cur.c)
                fail(ModelErrorCode::topology, where + ": expects " + std::to_string(c->in_channels) +
                                                   " input channels, receives " + std::to_string(cur.c));
            if (c->kernel == 0 || c->out_channels == 0)
                fail(ModelErrorCode::topology, where + ": empty kernel or output");
            if (c->weight.size() != c->out_channels * c->in_channels * c->kernel * c->kernel ||
                c->bias.size() != c->out_channels)
                fail(ModelErrorCode::size_mismatch, where + ": parameter arrays do not match the declared shape");
            const std::size_t ph = cur.h + 2 * c->padding, pw = cur.w + 2 * c->padding;
            if (ph < c->kernel || pw < c->kernel)
                fail(ModelErrorCode::topology, where + ": kernel larger than padded input");
            cur = {c->out_channels, ph - c->kernel + 1, pw - c->kernel + 1};
        }
        else if (const auto *b = std::get_if<BatchNorm>(&layer))
        {
            if (b->channels != cur.c)
                fail(ModelErrorCode::topology, where + ": channel count mismatch");
            if (b->gamma.size() != b->channels || b->beta.size() != b->channels || b->mean.size() != b->channels ||
                b->variance.size() != b->channels)
                fail(ModelErrorCode::size_mismatch, where + ": parameter arrays do not match the declared shape");
            if (!(b->epsilon > 0.0))
                fail(ModelErrorCode::topology, where + ": epsilon must be positive");
            for (double v : b->variance)
                if (!(v >= 0.0))
                    fail(ModelErrorCode::topology, where + ": negative running variance");
        }
        else if (std::holds_alternative<MaxPool2>(layer))
        {
            if (cur.h % 2 || cur.w % 2)
                fail(ModelErrorCode::topology, where + ": odd spatial size " + std::to_string(cur.h) + "x" +
                                                   std::to_string(cur.w));
            cur = {cur.c, cur.h / 2, cur.w / 2};
        }
        else if (std::holds_alternative<Upsample2>(layer))
        {
            cur = {cur.c, cur.h * 2, cur.w * 2};
        }
        else if (const auto *s = std::get_if<ConcatSkip>(&layer))
        {
            if (s->source >= i)
                fail(ModelErrorCode::topology, where + ": skip source must be an earlier layer");
            const Shape src = outputs[s->source];
            if (src.h != cur.h || src.w != cur.w)
                fail(ModelErrorCode::topology, where + ": skip source spatial size differs");
            cur = {cur.c + src.c, cur.h, cur.w};
        }
        outputs.push_back(cur);
    }
    if (!std::holds_alternative<Tanh>(model.layers.back()))
        fail(ModelErrorCode::topology, "final layer must be tanh");
    if (cur.c != 2 || cur.h != model.rows || cur.w != model.cols)
        fail(ModelErrorCode::topology, "output must be 2x" + std::to_string(model.rows) + "x" +
                                           std::to_string(model.cols) + ", got " + std::to_string(cur.c) + "x" +
                                           std::to_string(cur.h) + "x" + std::to_string(cur.w));
}

ModelPackage load_model(const std::filesystem::path &manifest, std::optional<RuntimeShape> runtime)
{
    std::ifstream in(manifest);
    if (!in)
        fail(ModelErrorCode::io, "cannot open " + manifest.string());

    ModelPackage model;
    std::filesystem::path blob_path;
    std::size_t blob_floats = 0;
    std::string checksum;
    // Offsets are checked against the running parameter count.
    try
    {
        const auto j = nlohmann::json::parse(in);
        if (j.at("format").get<std::string>() != format_name)
            fail(ModelErrorCode::parse, "not a dualband model manifest");
        if (j.at("version").get<int>() != format_version)
            fail(ModelErrorCode::parse, "unsupported manifest version " + j.at("version").dump());
        model.architecture = parse_architecture(j.at("architecture").get<std::string>());
        model.variant = parse_variant(j.at("variant").get<std::string>());
        model.input_channels = get_size(j, "input_channels");
        const auto &shape = j.at("shape");
        if (!shape.is_array() || shape.size() != 2)
            fail(ModelErrorCode::parse, "'shape' must be [rows, cols]");
        model.rows = shape[0].get<std::size_t>();
        model.cols = shape[1].get<std::size_t>();
        model.input_scale = j.at("input_scale").get<double>();
        model.output_scale = j.at("output_scale").get<double>();
        blob_path = manifest.parent_path() / j.at("blob").get<std::string>();
        blob_floats = get_size(j, "blob_floats");
        checksum = j.at("checksum").get<std::string>();

        std::size_t offset = 0;
        for (const auto &l : j.at("layers"))
        {
            const auto kind = l.at("kind").get<std::string>();
            if (kind == "conv")
            {
                Conv2d c;
                c.in_channels = get_size(l, "in_channels");
                c.out_channels = get_size(l, "out_channels");
                c.kernel = get_size(l, "kernel");
                c.padding = get_size(l, "padding");
                if (get_size(l, "offset") != offset)
                    fail(ModelErrorCode::size_mismatch, "conv offset " + l.at("offset").dump() + " expected " +
                                                            std::to_string(offset));
                offset += c.parameter_count();
                model.layers.emplace_back(std::move(c));
            }
            else if (kind == "batchnorm")
            {
                BatchNorm b;
                b.channels = get_size(l, "channels");
                b.epsilon = l.at("epsilon").get<double>();
                if (get_size(l, "offset") != offset)
                    fail(ModelErrorCode::size_mismatch, "batchnorm offset " + l.at("offset").dump() + " expected " +
                                                            std::to_string(offset));
                offset += b.parameter_count();
                model.layers.emplace_back(std::move(b));
            }
            else if (kind == "relu")
                model.layers.emplace_back(Relu{});
            else if (kind == "tanh")
                model.layers.emplace_back(Tanh{});
            else if (kind == "maxpool2")
                model.layers.emplace_back(MaxPool2{});
            else if (kind == "upsample2")
                model.layers.emplace_back(Upsample2{});
            else if (kind == "concat_skip")
                model.layers.emplace_back(ConcatSkip{get_size(l, "source")});
            else
                fail(ModelErrorCode::unknown_layer, "unknown layer kind '" + kind + "'");
        }
        if (offset != blob_floats)
            fail(ModelErrorCode::size_mismatch, "layers declare " + std::to_string(offset) +
                                                    " parameters, blob_floats is " + std::to_string(blob_floats));
    }
    catch (const ModelError &)
    {
        throw;
    }
    catch (const std::exception &e)
    {
        fail(ModelErrorCode::parse, manifest.string() + ": " + e.what());
    }

    std::ifstream bin(blob_path, std::ios::binary);
    if (!bin)
        fail(ModelErrorCode::io, "cannot open blob " + blob_path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());
    if (bytes.size() != blob_floats * sizeof(float))
        fail(ModelErrorCode::size_mismatch, "blob holds " + std::to_string(bytes.size()) + " bytes, expected " +
                                                std::to_string(blob_floats * sizeof(float)));
    const std::string actual = "crc32:" + hex32(crc32_of(bytes));
    if (actual != checksum)
        fail(ModelErrorCode::checksum_mismatch, "blob checksum " + actual + " does not match manifest " + checksum);

    std::vector<float> blob(blob_floats);
    if (!bytes.empty())
        std::memcpy(blob.data(), bytes.data(), bytes.size());
    std::size_t pos = 0;
    for (auto &layer : model.layers)
    {
        if (auto *c = std::get_if<Conv2d>(&layer))
        {
            take(c->weight, c->out_channels * c->in_channels * c->kernel * c->kernel, blob, pos);
            take(c->bias, c->out_channels, blob, pos);
        }
        else if (auto *b = std::get_if<BatchNorm>(&layer))
        {
            take(b->gamma, b->channels, blob, pos);
            take(b->beta, b->channels, blob, pos);
            take(b->mean, b->channels, blob, pos);
            take(b->variance, b->channels, blob, pos);
        }
    }

    validate_model(model);

    if (runtime && (runtime->rows != model.rows || runtime->cols != model.cols))
        fail(ModelErrorCode::shape_mismatch, "model trained for " + std::to_string(model.rows) + "x" +
                                                 std::to_string(model.cols) + " antennas, runtime uses " +
                                                 std::to_string(runtime->rows) + "x" + std::to_string(runtime->cols));
    return model;
}

void save_model(const ModelPackage &model, const std::filesystem::path &manifest)
{
    validate_model(model);
    std::vector<float> blob;
    nlohmann::ordered_json layers = nlohmann::ordered_json::array();
    for (const auto &layer : model.layers)
    {
        nlohmann::ordered_json l;
        l["kind"] = layer_kind(layer);
        if (const auto *c = std::get_if<Conv2d>(&layer))
        {
            l["in_channels"] = c->in_channels;
            l["out_channels"] = c->out_channels;
            l["kernel"] = c->kernel;
            l["padding"] = c->padding;
            l["offset"] = blob.size();
            put(blob, c->weight);
            put(blob, c->bias);
        }
        else if (const auto *b = std::get_if<BatchNorm>(&layer))
        {
            l["channels"] = b->channels;
            l["epsilon"] = b->epsilon;
            l["offset"] = blob.size();
            put(blob, b->gamma);
            put(blob, b->beta);
            put(blob, b->mean);
            put(blob, b->variance);
        }
        else if (const auto *s = std::get_if<ConcatSkip>(&layer))
            l["source"] = s->source;
        layers.push_back(std::move(l));
    }

    std::vector<unsigned char> bytes(blob.size() * sizeof(float));
    if (!bytes.empty())
        std::memcpy(bytes.data(), blob.data(), bytes.size());

    const std::string blob_name = manifest.stem().string() + ".bin";
    nlohmann::ordered_json j;
    j["format"] = format_name;
    j["version"] = format_version;
    j["architecture"] = to_string(model.architecture);
    j["variant"] = to_string(model.variant);
    j["input_channels"] = model.input_channels;
    j["shape"] = {model.rows, model.cols};
    j["input_scale"] = model.input_scale;
    j["output_scale"] = model.output_scale;
    j["blob"] = blob_name;
    j["blob_floats"] = blob.size();
    j["checksum"] = "crc32:" + hex32(crc32_of(bytes));
    j["layers"] = std::move(layers);

    if (manifest.has_parent_path())
        std::filesystem::create_directories(manifest.parent_path());
    {
        std::ofstream out(manifest.parent_path() / blob_name, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            fail(ModelErrorCode::io, "cannot write blob next to " + manifest.string());
    }
    std::ofstream out(manifest, std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out)
        fail(ModelErrorCode::io, "cannot write " + manifest.string());
}

} // namespace dualband::nn
