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

#include "helpers.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

using namespace dualband;
using namespace dualband::nn;

namespace
{

std::filesystem::path fresh_dir(const std::string &name)
{
    auto dir = std::filesystem::temp_directory_path() / ("dualband_nn_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

ModelErrorCode load_error(const std::filesystem::path &p, std::optional<RuntimeShape> rt = std::nullopt)
{
    try
    {
        (void)load_model(p, rt);
    }
    catch (const ModelError &e)
    {
        return e.code();
    }
    FAIL("load_model succeeded");
    return ModelErrorCode::io;
}

nlohmann::json read_json(const std::filesystem::path &p)
{
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

void write_json(const std::filesystem::path &p, const nlohmann::json &j)
{
    std::ofstream out(p);
    out << j.dump(2);
}

FeatureTensor random_input(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed)
{
    RngStream rng(seed);
    FeatureTensor x(c, h, w);
    for (auto &v : x.values())
        v = rng.normal();
    return x;
}

std::size_t count_kind(const ModelPackage &m, const std::string &kind)
{
    std::size_t n = 0;
    for (const auto &l : m.layers)
        n += layer_kind(l) == kind;
    return n;
}

} // namespace

TEST_CASE("CRC-32 check value", "[nn]")
{
    const std::string s = "123456789";
    CHECK(crc32_of(std::vector<unsigned char>(s.begin(), s.end())) == oracles::crc32_check);
}

TEST_CASE("reference architectures", "[nn]")
{
    SECTION("CNN")
    {
        const auto m = make_cnn(Variant::oob, 8, 8);
        CHECK(count_kind(m, "conv") == 10); // nine hidden plus the output layer
        CHECK(count_kind(m, "batchnorm") == 9);
        CHECK(std::holds_alternative<Tanh>(m.layers.back()));
        CHECK(std::get<Conv2d>(m.layers.front()).in_channels == 6);
        CHECK(make_cnn(Variant::inband, 8, 8).input_channels == 4);
        validate_model(m);
    }
    SECTION("UNet")
    {
        const auto m = make_unet(Variant::oob, 8, 8);
        validate_model(m);
        CHECK(m.layers.size() == 68);
        CHECK(count_kind(m, "maxpool2") == 2);
        CHECK(count_kind(m, "upsample2") == 2);
        CHECK(count_kind(m, "concat_skip") == 2);
        // spatial size seen by each conv: 8 in the first encoder, 4 in the second, 2 at the bottom
        std::size_t h = 8;
        std::vector<std::size_t> sizes;
        for (const auto &l : m.layers)
        {
            if (std::holds_alternative<MaxPool2>(l))
                h /= 2;
            else if (std::holds_alternative<Upsample2>(l))
                h *= 2;
            else if (std::holds_alternative<Conv2d>(l))
                sizes.push_back(h);
        }
        CHECK(std::count(sizes.begin(), sizes.end(), 8u) == 5 + 5 + 1);
        CHECK(std::count(sizes.begin(), sizes.end(), 4u) == 5 + 5);
        CHECK(sizes.size() == 21);
        CHECK_THROWS_AS(make_unet(Variant::oob, 6, 8), std::invalid_argument);
    }
}

TEST_CASE("forward pass properties", "[nn]")
{
    SECTION("zero weights give a zero matrix")
    {
        for (auto m : {make_cnn(Variant::oob, 8, 8), make_unet(Variant::oob, 8, 8)})
        {
            const auto y = forward(m, random_input(6, 8, 8, 1));
            CHECK(y.isZero());
        }
    }
    SECTION("identity network")
    {
        ModelPackage m;
        m.variant = Variant::oob;
        m.input_channels = 6;
        m.rows = 3;
        m.cols = 2;
        m.output_scale = 2.0;
        Conv2d c{6, 2, 1, 0, std::vector<double>(12, 0.0), {0.0, 0.0}};
        c.weight[0 * 6 + 0] = 1.0;
        c.weight[1 * 6 + 1] = 1.0;
        m.layers = {c, Tanh{}};
        const auto x = random_input(6, 3, 2, 2);
        const auto y = forward(m, x);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j)
            {
                const cdouble expect(2.0 * std::tanh(x.at(0, i, j)), 2.0 * std::tanh(x.at(1, i, j)));
                CHECK(std::abs(y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - expect) < 1e-12);
            }
    }
    SECTION("deterministic and bounded")
    {
        for (auto m : {make_cnn(Variant::oob, 8, 8), make_unet(Variant::inband, 8, 8)})
        {
            randomize_parameters(m, 17);
            m.output_scale = 0.3;
            const auto x = random_input(m.input_channels, 8, 8, 3);
            const auto raw = forward_features(m, x);
            for (double v : raw.values())
            {
                CHECK(v > -1.0);
                CHECK(v < 1.0);
            }
            const auto a = forward(m, x), b = forward(m, x);
            CHECK(a == b);
            CHECK(a.cwiseAbs().maxCoeff() <= 0.3 * std::sqrt(2.0));
            CHECK(a.real().cwiseAbs().maxCoeff() < 0.3);
        }
    }
    SECTION("wrong input shape")
    {
        const auto m = make_cnn(Variant::oob, 8, 8);
        CHECK_THROWS_AS(forward(m, random_input(4, 8, 8, 1)), ModelError);
        CHECK_THROWS_AS(forward(m, random_input(6, 4, 4, 1)), ModelError);
    }
}

TEST_CASE("per-subcarrier application", "[nn]")
{
    auto m = make_cnn(Variant::oob, 4, 4, 8, 2);
    randomize_parameters(m, 5);
    const auto inband = testing::random_tensor(5, 4, 4, 1);
    const auto oob = testing::random_tensor(5, 4, 4, 2);
    const auto out = estimate_all_subcarriers(m, inband, &oob, 3.0, 0.1);
    REQUIRE(out.size() == 5);
    for (std::size_t n = 0; n < 5; ++n)
    {
        const ComplexMatrix ib = inband[n], ob = oob[n];
        CHECK(ComplexMatrix(out[n]) == forward(m, assemble_input(m, ib, &ob, 3.0, 0.1)));
    }

    // identical inputs give identical outputs; permuted inputs permute outputs
    const auto same_ib = testing::flat_tensor(inband[0], 3), same_ob = testing::flat_tensor(oob[0], 3);
    const auto same = estimate_all_subcarriers(m, same_ib, &same_ob, 3.0, 0.1);
    CHECK(ComplexMatrix(same[1]) == ComplexMatrix(same[0]));
    CHECK(ComplexMatrix(same[2]) == ComplexMatrix(same[0]));
    const std::vector<std::size_t> perm{4, 2, 0};
    const auto picked = estimate_all_subcarriers(m, inband, &oob, 3.0, 0.1, &perm);
    REQUIRE(picked.size() == 3);
    CHECK(ComplexMatrix(picked[0]) == ComplexMatrix(out[4]));
    CHECK(ComplexMatrix(picked[1]) == ComplexMatrix(out[2]));
    CHECK(ComplexMatrix(picked[2]) == ComplexMatrix(out[0]));

    const auto one_ib = testing::flat_tensor(inband[1], 1), one_ob = testing::flat_tensor(oob[1], 1);
    const auto one = estimate_all_subcarriers(m, one_ib, &one_ob, 3.0, 0.1);
    CHECK(ComplexMatrix(one[0]) == ComplexMatrix(out[1]));
}

TEST_CASE("model packages round trip", "[nn]")
{
    const auto dir = fresh_dir("roundtrip");
    for (auto m : {make_cnn(Variant::inband, 8, 8), make_unet(Variant::oob, 8, 8)})
    {
        randomize_parameters(m, 9);
        m.input_scale = 0.25;
        m.output_scale = 4.0;
        const auto path = dir / (to_string(m.architecture) + ".json");
        save_model(m, path);
        const auto loaded = load_model(path, RuntimeShape{8, 8});
        CHECK(loaded.layers.size() == m.layers.size());
        CHECK(loaded.input_scale == 0.25);
        const auto x = random_input(m.input_channels, 8, 8, 4);
        // weights are stored as float32
        CHECK((forward(loaded, x) - forward(m, x)).norm() < 1e-4 * forward(m, x).norm());
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("model load errors", "[nn]")
{
    const auto dir = fresh_dir("errors");
    auto m = make_cnn(Variant::oob, 8, 8, 4, 2);
    randomize_parameters(m, 1);
    const auto path = dir / "m.json";
    save_model(m, path);
    const auto blob = dir / "m.bin";
    const auto good = read_json(path);
    const auto blob_size = std::filesystem::file_size(blob);

    SECTION("runtime shape")
    {
        CHECK(load_error(path, RuntimeShape{4, 4}) == ModelErrorCode::shape_mismatch);
    }
    SECTION("truncated blob")
    {
        std::filesystem::resize_file(blob, blob_size - 4);
        CHECK(load_error(path) == ModelErrorCode::size_mismatch);
    }
    SECTION("corrupted blob")
    {
        std::fstream f(blob, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(10);
        f.put('\x7f');
        f.close();
        CHECK(load_error(path) == ModelErrorCode::checksum_mismatch);
    }
    SECTION("unknown layer kind")
    {
        auto j = good;
        j["layers"][1]["kind"] = "gelu";
        write_json(path, j);
        CHECK(load_error(path) == ModelErrorCode::unknown_layer);
    }
    SECTION("wrong offset")
    {
        auto j = good;
        j["layers"][2]["offset"] = 3; // first batchnorm
        write_json(path, j);
        CHECK(load_error(path) == ModelErrorCode::size_mismatch);
    }
    SECTION("malformed manifest")
    {
        std::ofstream(path) << "{ not json";
        CHECK(load_error(path) == ModelErrorCode::parse);
    }
    SECTION("missing manifest")
    {
        CHECK(load_error(dir / "absent.json") == ModelErrorCode::io);
    }
    SECTION("bad topology")
    {
        auto j = good;
        j["layers"].erase(j["layers"].size() - 1); // drop the tanh
        write_json(path, j);
        CHECK(load_error(path) == ModelErrorCode::topology);

        j = good;
        j["input_channels"] = 4;
        write_json(path, j);
        CHECK(load_error(path) == ModelErrorCode::topology);
    }
    SECTION("skip to a later layer")
    {
        ModelPackage bad = make_unet(Variant::oob, 8, 8);
        for (auto &l : bad.layers)
            if (auto *s = std::get_if<ConcatSkip>(&l))
                s->source = 1000;
        CHECK_THROWS_AS(validate_model(bad), ModelError);
    }
    std::filesystem::remove_all(dir);
}
