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

#include <catch_amalgamated.hpp>

using namespace dualband;
using namespace dualband::nn;

namespace
{

FeatureTensor random_features(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed)
{
    RngStream rng(seed);
    FeatureTensor x(c, h, w);
    for (auto &v : x.values())
        v = rng.normal();
    return x;
}

Conv2d random_conv(std::size_t in, std::size_t out, std::size_t k, std::uint64_t seed)
{
    RngStream rng(seed);
    Conv2d c{in, out, k, (k - 1) / 2, {}, {}};
    c.weight.resize(out * in * k * k);
    c.bias.resize(out);
    for (auto &v : c.weight)
        v = rng.normal();
    for (auto &v : c.bias)
        v = rng.normal();
    return c;
}

FeatureTensor naive_conv(const FeatureTensor &x, const Conv2d &c)
{
    const auto h = x.height(), w = x.width();
    FeatureTensor y(c.out_channels, h, w);
    const auto p = static_cast<long>(c.padding);
    const auto k = c.kernel;
    for (std::size_t o = 0; o < c.out_channels; ++o)
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < w; ++j)
            {
                double acc = c.bias[o];
                for (std::size_t ci = 0; ci < c.in_channels; ++ci)
                    for (std::size_t a = 0; a < k; ++a)
                        for (std::size_t b = 0; b < k; ++b)
                        {
                            const long ii = static_cast<long>(i + a) - p, jj = static_cast<long>(j + b) - p;
                            if (ii < 0 || jj < 0 || ii >= static_cast<long>(h) || jj >= static_cast<long>(w))
                                continue;
                            acc += c.weight[((o * c.in_channels + ci) * k + a) * k + b] *
                                   x.at(ci, static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
                        }
                y.at(o, i, j) = acc;
            }
    return y;
}

double max_abs_diff(const FeatureTensor &a, const FeatureTensor &b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

} // namespace

TEST_CASE("feature tensor shape", "[nn]")
{
    FeatureTensor x(3, 2, 4, 1.5);
    CHECK(x.values().size() == 24);
    CHECK(x.at(2, 1, 3) == 1.5);
    CHECK_THROWS_AS(FeatureTensor(0, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(FeatureTensor(1, 0, 2), std::invalid_argument);
}

TEST_CASE("convolution", "[nn]")
{
    SECTION("1x1 unit kernel is the identity")
    {
        const auto x = random_features(1, 8, 8, 1);
        Conv2d c{1, 1, 1, 0, {1.0}, {0.0}};
        CHECK(conv2d(x, c) == x);
    }
    SECTION("zero weights give the bias")
    {
        const auto x = random_features(3, 8, 8, 2);
        Conv2d c{3, 2, 3, 1, std::vector<double>(54, 0.0), {0.5, -2.0}};
        const auto y = conv2d(x, c);
        for (std::size_t i = 0; i < 64; ++i)
        {
            CHECK(y.values()[i] == 0.5);
            CHECK(y.values()[64 + i] == -2.0);
        }
    }
    SECTION("ones kernel counts the padded window")
    {
        const FeatureTensor x(1, 8, 8, 1.0);
        Conv2d c{1, 1, 3, 1, std::vector<double>(9, 1.0), {0.0}};
        const auto y = conv2d(x, c);
        CHECK(y.at(0, 3, 4) == 9.0);
        CHECK(y.at(0, 0, 4) == 6.0);
        CHECK(y.at(0, 5, 7) == 6.0);
        CHECK(y.at(0, 0, 0) == 4.0);
        CHECK(y.at(0, 7, 7) == 4.0);
    }
    SECTION("matches a direct loop")
    {
        for (auto [cin, cout, k, h, w] : {std::tuple{6u, 5u, 3u, 8u, 8u}, std::tuple{2u, 3u, 5u, 4u, 6u},
                                          std::tuple{64u, 2u, 3u, 2u, 2u}, std::tuple{1u, 1u, 1u, 3u, 7u}})
        {
            const auto x = random_features(cin, h, w, cin * 100 + k);
            const auto c = random_conv(cin, cout, k, cout * 7 + h);
            const auto y = conv2d(x, c);
            CHECK(y.channels() == cout);
            CHECK(y.height() == h);
            CHECK(y.width() == w);
            CHECK(max_abs_diff(y, naive_conv(x, c)) < 1e-10);
        }
    }
    SECTION("channel mismatch")
    {
        CHECK_THROWS(conv2d(random_features(2, 4, 4, 1), random_conv(3, 1, 3, 1)));
    }
}

TEST_CASE("batch norm", "[nn]")
{
    FeatureTensor x(1, 2, 2, 4.0);
    BatchNorm id{1, 0.0, {1.0}, {0.0}, {0.0}, {1.0}};
    CHECK(batch_norm_inference(x, id) == x);
    BatchNorm bn{1, 0.0, {1.0}, {0.0}, {2.0}, {4.0}};
    CHECK(batch_norm_inference(x, bn).at(0, 1, 1) == 1.0);
    const auto r = random_features(1, 3, 3, 5);
    BatchNorm flat{1, 1e-5, {0.0}, {0.7}, {1.0}, {2.0}};
    const auto flat_out = batch_norm_inference(r, flat);
    for (double v : flat_out.values())
        CHECK(v == 0.7);
    BatchNorm bad{1, 1e-5, {1.0}, {0.0}, {0.0}, {-1.0}};
    CHECK_THROWS(batch_norm_inference(x, bad));
}

TEST_CASE("activations", "[nn]")
{
    FeatureTensor x(1, 1, 4);
    x.values() = {-1.0, 2.0, 0.0, 10.0};
    const auto r = activation(x, Activation::relu);
    CHECK(r.values() == std::vector<double>{0.0, 2.0, 0.0, 10.0});
    const auto t = activation(x, Activation::tanh);
    CHECK(t.values()[2] == 0.0);
    CHECK(t.values()[3] < 1.0);
    FeatureTensor n(1, 1, 1, -10.0);
    CHECK(activation(n, Activation::tanh).values()[0] > -1.0);
}

TEST_CASE("pooling and upsampling", "[nn]")
{
    const FeatureTensor c(2, 4, 4, 3.0);
    CHECK(maxpool2(c) == FeatureTensor(2, 2, 2, 3.0));
    CHECK(upsample2(c) == FeatureTensor(2, 8, 8, 3.0));

    FeatureTensor x(1, 2, 2);
    x.values() = {1, 2, 3, 4};
    CHECK(maxpool2(x).values() == std::vector<double>{4});
    CHECK(upsample2(FeatureTensor(1, 1, 1, 4.0)).values() == std::vector<double>{4, 4, 4, 4});

    // block-constant inputs survive the round trip
    const auto small = random_features(3, 2, 4, 9);
    const auto blocky = upsample2(small);
    CHECK(upsample2(maxpool2(blocky)) == blocky);

    CHECK_THROWS(maxpool2(FeatureTensor(1, 3, 4)));
}

TEST_CASE("skip concatenation", "[nn]")
{
    const auto a = random_features(2, 4, 4, 1);
    const auto b = random_features(3, 4, 4, 2);
    const auto ab = concat_skip(a, b);
    REQUIRE(ab.channels() == 5);
    CHECK(std::equal(a.values().begin(), a.values().end(), ab.values().begin()));
    CHECK(std::equal(b.values().begin(), b.values().end(), ab.values().begin() + 32));
    const auto az = concat_skip(a, FeatureTensor(3, 4, 4));
    CHECK(std::equal(a.values().begin(), a.values().end(), az.values().begin()));
    CHECK_FALSE(concat_skip(b, a) == ab);
    CHECK_THROWS(concat_skip(a, FeatureTensor(1, 2, 2)));
}

TEST_CASE("input assembly", "[nn]")
{
    const ComplexMatrix zero = ComplexMatrix::Zero(8, 8);
    const auto zeros = assemble_input(zero, &zero, 0.0, 0.0, 1.0, 6);
    for (double v : zeros.values())
        CHECK(v == 0.0);

    const ComplexMatrix ones = ComplexMatrix::Ones(8, 8);
    const auto x = assemble_input(ones, &ones, 0.0, 1.0, 1.0, 6);
    REQUIRE(x.channels() == 6);
    const double expected[6] = {1, 0, 1, 0, 0, 1};
    for (std::size_t c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < 64; ++i)
            CHECK(x.values()[c * 64 + i] == expected[c]);

    ComplexMatrix h(2, 2);
    h << cdouble(1, 2), cdouble(3, 4), cdouble(5, 6), cdouble(7, 8);
    const auto y = assemble_input(h, &h, 99.0, 0.25, 0.5, 6);
    CHECK(y.at(0, 1, 0) == 2.5);
    CHECK(y.at(1, 0, 1) == 2.0);
    CHECK(y.at(4, 1, 1) == Catch::Approx(0.5 * 2.0));
    CHECK(y.at(5, 0, 0) == 0.125);

    const auto in = assemble_input(h, nullptr, 5.0, 0.25, 2.0, 4);
    REQUIRE(in.channels() == 4);
    CHECK(in.at(0, 0, 0) == 2.0);
    CHECK(in.at(1, 1, 1) == 16.0);
    CHECK(in.at(2, 1, 0) == 0.5);
    CHECK(in.at(3, 0, 1) == 0.0);

    CHECK_THROWS(assemble_input(h, nullptr, 0.0, 0.0, 1.0, 6));
    const ComplexMatrix other = ComplexMatrix::Zero(3, 2);
    CHECK_THROWS(assemble_input(h, &other, 0.0, 0.0, 1.0, 6));
}
