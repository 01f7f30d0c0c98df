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
#include "dualband/experiments.hpp"
#include "dualband/pipeline.hpp"

#include "helpers.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <fstream>
#include <numbers>

using namespace dualband;

namespace
{

// Kolmogorov-Smirnov distance of `v` from U(lo, hi).
double ks_uniform(std::vector<double> v, double lo, double hi)
{
    std::sort(v.begin(), v.end());
    double d = 0.0;
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        const double f = (v[i] - lo) / (hi - lo);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

ExperimentPlan tiny_plan()
{
    ExperimentPlan p;
    p.methods = {"perfect", "non_ml", "mrc", "cnn_oob"};
    p.snr_db = {-10.0, 10.0};
    p.k_db = {0.0, 20.0};
    p.realizations = 3;
    p.seed = 11;
    p.config = testing::small_config(32, 64);
    p.cdf.samples = 4;
    return p;
}

std::string field_of(const std::function<void()> &f)
{
    try
    {
        f();
    }
    catch (const ConfigException &e)
    {
        return e.errors().front().field;
    }
    return "";
}

} // namespace

TEST_CASE("draw ranges", "[experiments]")
{
    const auto r = parse_ranges("snr_db=-5:5,angle_deg=-30:30");
    CHECK(r.snr_db.lo == -5.0);
    CHECK(r.snr_db.hi == 5.0);
    CHECK(r.k_db.lo == -20.0);
    CHECK(r.angle_deg.hi == 30.0);
    CHECK(parse_ranges("").k_db.hi == 30.0);

    CHECK(field_of([] { parse_ranges("snr_db=5:-5"); }) == "ranges.snr_db");
    CHECK(field_of([] { parse_ranges("angle_deg=-100:0"); }) == "ranges.angle_deg");
    CHECK(field_of([] { parse_ranges("foo=1:2"); }) == "ranges");
    CHECK(field_of([] { parse_ranges("snr_db=a:b"); }) == "ranges.snr_db");
    CHECK(field_of([] { parse_ranges("snr_db"); }) == "ranges");
}

TEST_CASE("parameter draws are uniform", "[experiments]")
{
    const DrawRanges ranges;
    RngStream rng(123);
    std::vector<double> snr, k, aod, aoa, ph;
    for (int i = 0; i < 50000; ++i)
    {
        const auto p = draw_parameters(ranges, rng);
        snr.push_back(p.snr_db);
        k.push_back(p.k_db);
        aod.push_back(p.aod);
        aoa.push_back(p.aoa);
        ph.push_back(p.phase_mmw);
    }
    const double half_pi = std::numbers::pi / 2;
    CHECK(ks_uniform(snr, -20.0, 10.0) < 0.02);
    CHECK(ks_uniform(k, -20.0, 30.0) < 0.02);
    CHECK(ks_uniform(aod, -half_pi, half_pi) < 0.02);
    CHECK(ks_uniform(aoa, -half_pi, half_pi) < 0.02);
    CHECK(ks_uniform(ph, -std::numbers::pi, std::numbers::pi) < 0.02);

    RngStream a(9), b(9);
    const auto pa = draw_parameters(ranges, a), pb = draw_parameters(ranges, b);
    CHECK(pa.snr_db == pb.snr_db);
    CHECK(pa.phase_sub6 == pb.phase_sub6);
}

TEST_CASE("plans", "[experiments]")
{
    SECTION("defaults")
    {
        const auto p = plan_from_json(nlohmann::json::object());
        CHECK(p.methods.size() == 7);
        CHECK(p.snr_db.size() == 7);
        CHECK(p.k_db == std::vector<double>{-20.0, 10.0, 20.0});
        CHECK(p.realizations == 100);
        CHECK(p.subcarrier_stride == 1);
        CHECK(p.cdf.samples == 2000);
        CHECK(p.config.mmw.num_subcarriers == 3360);
    }
    SECTION("round trip")
    {
        auto p = tiny_plan();
        p.angle_deg = {-45.0, 45.0};
        p.subcarrier_stride = 4;
        p.cdf.ranges.snr_db = {0.0, 5.0};
        const auto back = plan_from_json(nlohmann::json::parse(plan_to_json(p).dump()));
        CHECK(back.methods == p.methods);
        CHECK(back.snr_db == p.snr_db);
        CHECK(back.seed == 11);
        CHECK(back.angle_deg.lo == -45.0);
        CHECK(back.subcarrier_stride == 4);
        CHECK(back.cdf.ranges.snr_db.hi == 5.0);
        CHECK(back.config.mmw.num_subcarriers == 64);
        CHECK(plan_to_json(back).dump() == plan_to_json(p).dump());
    }
    SECTION("config from a relative path")
    {
        const auto dir = std::filesystem::temp_directory_path() / "dualband_plan_test";
        std::filesystem::create_directories(dir);
        nlohmann::json cfg;
        to_json(cfg, testing::small_config(32, 64));
        std::ofstream(dir / "band.json") << cfg.dump();
        std::ofstream(dir / "plan.json") << R"({"config": "band.json", "realizations": 2})";
        const auto p = load_plan(dir / "plan.json");
        CHECK(p.config.sub6.num_subcarriers == 32);
        CHECK(p.realizations == 2);
        std::filesystem::remove_all(dir);
    }
    SECTION("errors name their field")
    {
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"methods": ["svd"]})")); }) == "methods");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"methods": []})")); }) == "methods");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"realizations": 0})")); }) == "realizations");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"snr_db": []})")); }) == "snr_db");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"subcarrier_stride": -1})")); }) ==
              "subcarrier_stride");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"angle_deg": [0]})")); }) == "angle_deg");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"cdf": {"samples": 0}})")); }) == "cdf.samples");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"seed": "x"})")); }) == "plan");
        CHECK(field_of([] { plan_from_json(nlohmann::json::parse(R"({"config": {"mmw": {"num_tx": 0}}})")); }) ==
              "mmw.num_tx");
        CHECK(field_of([] { load_plan("/nonexistent/plan.json"); }) == "plan");
    }
}

TEST_CASE("parallel_for", "[experiments]")
{
    for (std::size_t workers : {1u, 2u, 4u, 16u})
    {
        std::vector<int> hits(100, 0);
        parallel_for(100, workers, [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no tasks expected"); });
    std::atomic<int> ran{0};
    CHECK_THROWS_WITH(parallel_for(50, 3,
                                   [&](std::size_t i) {
                                       ++ran;
                                       if (i == 7)
                                           throw std::runtime_error("task 7");
                                   }),
                      "task 7");
}

TEST_CASE("NMSE sweep", "[experiments]")
{
    const auto plan = tiny_plan();
    const auto a = run_nmse_sweep(plan, {{}, 1});
    const auto b = run_nmse_sweep(plan, {{}, 3});
    REQUIRE(a.records.size() == 2 * 2 * 3 * 3);
    CHECK(a.records == b.records);
    REQUIRE(a.warnings.size() == 1);
    CHECK(a.warnings[0].find("cnn_oob") != std::string::npos);

    // order: K, SNR, realization, method
    CHECK(a.records[0].k_db == 0.0);
    CHECK(a.records[0].snr_db == -10.0);
    CHECK(a.records[0].method == "perfect");
    CHECK(a.records[1].method == "non_ml");
    CHECK(a.records[9].snr_db == 10.0);
    CHECK(a.records[18].k_db == 20.0);

    for (const auto &r : a.records)
    {
        REQUIRE(r.nmse);
        CHECK(*r.nmse >= 0.0);
        CHECK_FALSE(r.se);
        if (r.method == "perfect")
            CHECK(*r.nmse == 0.0);
    }
    // same link across the SNR grid
    CHECK(a.records[0].seed == a.records[9].seed);
    CHECK(a.records[0].seed != a.records[3].seed);

    auto other = plan;
    other.seed = 12;
    CHECK(run_nmse_sweep(other, {{}, 1}).records != a.records);

    auto strided = plan;
    strided.subcarrier_stride = 8;
    CHECK(run_nmse_sweep(strided, {{}, 1}).records.size() == a.records.size());
}

TEST_CASE("SE CDF run", "[experiments]")
{
    const auto plan = tiny_plan();
    const auto a = run_se_cdf(plan, {{}, 1});
    const auto b = run_se_cdf(plan, {{}, 2});
    REQUIRE(a.records.size() == 4 * 3);
    CHECK(a.records == b.records);
    for (std::size_t i = 0; i < 4; ++i)
    {
        const auto &perfect = a.records[3 * i];
        REQUIRE(perfect.method == "perfect");
        CHECK(*perfect.se >= 0.0);
        CHECK(perfect.snr_db >= -20.0);
        CHECK(perfect.snr_db <= 10.0);
        CHECK(perfect.seed == RngStream::derive_seed(11, {i}));
    }
}

TEST_CASE("default worker count", "[experiments]")
{
    // ctest sets DUALBAND_WORKERS=1
    if (const char *env = std::getenv("DUALBAND_WORKERS"); env && std::string(env) == "1")
        CHECK(default_workers() == 1);
    CHECK(default_workers() >= 1);
}
