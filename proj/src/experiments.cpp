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

#include "dualband/channel_model.hpp"
#include "dualband/nn.hpp"
#include "dualband/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace dualband
{

namespace
{

// Stream ids mixed into derive(); keep them distinct per purpose.
enum StreamId : std::uint64_t
{
    sweep_channel = 0,
    sweep_noise = 1,
    cdf_channel = 2,
    cdf_noise = 3,
    dataset_channel = 4,
    dataset_noise = 5,
};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

[[noreturn]] void plan_error(const std::string &field, const std::string &message)
{
    throw ConfigException({ConfigError{field, message}});
}

ParameterRange range_from_json(const nlohmann::json &j, const std::string &field)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        plan_error(field, "expected [lo, hi]");
    return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::ordered_json range_to_json(const ParameterRange &r) { return {r.lo, r.hi}; }

void check_range(const ParameterRange &r, const std::string &field)
{
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
        plan_error(field, "range must be finite with lo <= hi");
}

struct Link
{
    ChannelRealization realization;
    EstimateBundle bundle;
};

Link simulate_link(const DualBandConfig &cfg, const ScenarioDraw &scenario, RngStream &channel_rng,
                   RngStream &noise_rng)
{
    Link link;
    link.realization = gen_channel(cfg, scenario, channel_rng);
    link.bundle = run_training_phase(cfg, link.realization, noise_rng);
    return link;
}

ScenarioDraw scenario_from(const DualBandConfig &cfg, const DrawnParameters &p)
{
    return ScenarioDraw::make(cfg, p.aod, p.aoa, db_to_linear(p.k_db), db_to_linear(p.snr_db), p.phase_sub6,
                              p.phase_mmw);
}

} // namespace

DrawRanges parse_ranges(const std::string &text)
{
    DrawRanges r;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ','))
    {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || colon == std::string::npos)
            plan_error("ranges", "expected name=lo:hi, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        ParameterRange pr;
        try
        {
            std::size_t pos = 0;
            const std::string lo = item.substr(eq + 1, colon - eq - 1);
            const std::string hi = item.substr(colon + 1);
            pr.lo = std::stod(lo, &pos);
            if (pos != lo.size())
                throw std::invalid_argument(lo);
            pr.hi = std::stod(hi, &pos);
            if (pos != hi.size())
                throw std::invalid_argument(hi);
        }
        catch (const std::exception &)
        {
            plan_error("ranges." + key, "malformed bounds in '" + item + "'");
        }
        if (key == "snr_db")
            r.snr_db = pr;
        else if (key == "k_db")
            r.k_db = pr;
        else if (key == "angle_deg")
            r.angle_deg = pr;
        else
            plan_error("ranges", "unknown range '" + key + "'");
    }
    validate_ranges(r);
    return r;
}

void validate_ranges(const DrawRanges &ranges)
{
    check_range(ranges.snr_db, "ranges.snr_db");
    check_range(ranges.k_db, "ranges.k_db");
    check_range(ranges.angle_deg, "ranges.angle_deg");
    if (ranges.angle_deg.lo < -90.0 || ranges.angle_deg.hi > 90.0)
        plan_error("ranges.angle_deg", "angles must lie in [-90, 90] degrees");
}

DrawnParameters draw_parameters(const DrawRanges &ranges, RngStream &rng)
{
    DrawnParameters p;
    p.snr_db = rng.uniform(ranges.snr_db.lo, ranges.snr_db.hi);
    p.k_db = rng.uniform(ranges.k_db.lo, ranges.k_db.hi);
    p.aod = deg_to_rad(rng.uniform(ranges.angle_deg.lo, ranges.angle_deg.hi));
    p.aoa = deg_to_rad(rng.uniform(ranges.angle_deg.lo, ranges.angle_deg.hi));
    p.phase_sub6 = rng.uniform(-std::numbers::pi, std::numbers::pi);
    p.phase_mmw = rng.uniform(-std::numbers::pi, std::numbers::pi);
    return p;
}

ExperimentPlan plan_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir)
{
    if (!j.is_object())
        plan_error("plan", "expected a JSON object");
    ExperimentPlan p;
    try
    {
        if (j.contains("methods"))
            p.methods = j.at("methods").get<std::vector<std::string>>();
        if (j.contains("snr_db"))
            p.snr_db = j.at("snr_db").get<std::vector<double>>();
        if (j.contains("k_db"))
            p.k_db = j.at("k_db").get<std::vector<double>>();
        if (j.contains("realizations"))
        {
            if (!j.at("realizations").is_number_integer() || j.at("realizations").get<long long>() < 1)
                plan_error("realizations", "must be a positive integer");
            p.realizations = j.at("realizations").get<std::size_t>();
        }
        if (j.contains("seed"))
            p.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("angle_deg"))
            p.angle_deg = range_from_json(j.at("angle_deg"), "angle_deg");
        if (j.contains("subcarrier_stride"))
        {
            if (!j.at("subcarrier_stride").is_number_integer() || j.at("subcarrier_stride").get<long long>() < 1)
                plan_error("subcarrier_stride", "must be a positive integer");
            p.subcarrier_stride = j.at("subcarrier_stride").get<std::size_t>();
        }
        if (j.contains("config"))
        {
            const auto &c = j.at("config");
            if (c.is_string())
            {
                std::filesystem::path path = c.get<std::string>();
                if (path.is_relative())
                    path = base_dir / path;
                p.config = load_config(path);
            }
            else
                p.config = config_from_json(c);
        }
        if (j.contains("cdf"))
        {
            const auto &c = j.at("cdf");
            if (c.contains("samples"))
            {
                if (!c.at("samples").is_number_integer() || c.at("samples").get<long long>() < 1)
                    plan_error("cdf.samples", "must be a positive integer");
                p.cdf.samples = c.at("samples").get<std::size_t>();
            }
            if (c.contains("snr_db"))
                p.cdf.ranges.snr_db = range_from_json(c.at("snr_db"), "cdf.snr_db");
            if (c.contains("k_db"))
                p.cdf.ranges.k_db = range_from_json(c.at("k_db"), "cdf.k_db");
            if (c.contains("angle_deg"))
                p.cdf.ranges.angle_deg = range_from_json(c.at("angle_deg"), "cdf.angle_deg");
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        plan_error("plan", e.what());
    }
    validate_plan(p);
    return p;
}

ExperimentPlan load_plan(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        plan_error("plan", "cannot open " + path.string());
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception &e)
    {
        plan_error("plan", path.string() + ": " + e.what());
    }
    return plan_from_json(j, path.parent_path());
}

nlohmann::ordered_json plan_to_json(const ExperimentPlan &plan)
{
    nlohmann::ordered_json j;
    j["methods"] = plan.methods;
    j["snr_db"] = plan.snr_db;
    j["k_db"] = plan.k_db;
    j["realizations"] = plan.realizations;
    j["seed"] = plan.seed;
    j["angle_deg"] = range_to_json(plan.angle_deg);
    j["subcarrier_stride"] = plan.subcarrier_stride;
    nlohmann::json cfg;
    to_json(cfg, plan.config);
    j["config"] = cfg;
    j["cdf"] = {{"samples", plan.cdf.samples},
                {"snr_db", range_to_json(plan.cdf.ranges.snr_db)},
                {"k_db", range_to_json(plan.cdf.ranges.k_db)},
                {"angle_deg", range_to_json(plan.cdf.ranges.angle_deg)}};
    return j;
}

void validate_plan(const ExperimentPlan &plan)
{
    std::vector<ConfigError> errors = validate_config(plan.config);
    if (plan.methods.empty())
        errors.push_back({"methods", "method list is empty"});
    for (const auto &m : plan.methods)
        if (!is_known_method(m))
            errors.push_back({"methods", "unknown method '" + m + "'"});
    if (plan.snr_db.empty())
        errors.push_back({"snr_db", "SNR grid is empty"});
    if (plan.k_db.empty())
        errors.push_back({"k_db", "K grid is empty"});
    for (double v : plan.snr_db)
        if (!std::isfinite(v))
            errors.push_back({"snr_db", "non-finite grid value"});
    for (double v : plan.k_db)
        if (!std::isfinite(v))
            errors.push_back({"k_db", "non-finite grid value"});
    if (plan.realizations < 1)
        errors.push_back({"realizations", "must be at least 1"});
    if (plan.subcarrier_stride < 1)
        errors.push_back({"subcarrier_stride", "must be at least 1"});
    if (plan.cdf.samples < 1)
        errors.push_back({"cdf.samples", "must be at least 1"});
    if (!errors.empty())
        throw ConfigException(std::move(errors));
    check_range(plan.angle_deg, "angle_deg");
    if (plan.angle_deg.lo < -90.0 || plan.angle_deg.hi > 90.0)
        plan_error("angle_deg", "angles must lie in [-90, 90] degrees");
    validate_ranges(plan.cdf.ranges);
}

RunResult run_nmse_sweep(const ExperimentPlan &plan, const RunOptions &options)
{
    validate_plan(plan);
    const DualBandConfig &cfg = plan.config;
    const MethodSet methods = load_methods(plan.methods, options.models_dir, cfg);
    const auto subcarriers = strided_subcarriers(cfg.mmw.num_subcarriers, plan.subcarrier_stride);

    const std::size_t n_snr = plan.snr_db.size();
    const std::size_t n_r = plan.realizations;
    const std::size_t n_m = methods.tags.size();
    const std::size_t tasks = plan.k_db.size() * n_snr * n_r;

    RunResult out;
    out.warnings = methods.warnings;
    out.records.resize(tasks * n_m);

    parallel_for(tasks, options.workers, [&](std::size_t t) {
        const std::size_t ki = t / (n_snr * n_r);
        const std::size_t si = (t / n_r) % n_snr;
        const std::size_t r = t % n_r;

        RngStream channel_rng = RngStream::derive(plan.seed, {sweep_channel, ki, r});
        RngStream noise_rng = RngStream::derive(plan.seed, {sweep_noise, ki, r});
        DrawRanges fixed;
        fixed.angle_deg = plan.angle_deg;
        DrawnParameters p = draw_parameters(fixed, channel_rng);
        p.snr_db = plan.snr_db[si];
        p.k_db = plan.k_db[ki];

        const Link link = simulate_link(cfg, scenario_from(cfg, p), channel_rng, noise_rng);
        const ChannelTensor truth = link.realization.h_mmw.select(subcarriers);
        const std::uint64_t seed = RngStream::derive_seed(plan.seed, {ki, r});
        for (std::size_t m = 0; m < n_m; ++m)
        {
            const auto est = apply_method(methods.tags[m], methods, link.bundle, link.realization.h_mmw, cfg,
                                          subcarriers);
            MetricRecord &rec = out.records[t * n_m + m];
            rec.method = methods.tags[m];
            rec.snr_db = p.snr_db;
            rec.k_db = p.k_db;
            rec.seed = seed;
            rec.nmse = nmse(truth, est).value;
        }
    });
    return out;
}

RunResult run_se_cdf(const ExperimentPlan &plan, const RunOptions &options)
{
    validate_plan(plan);
    const DualBandConfig &cfg = plan.config;
    const MethodSet methods = load_methods(plan.methods, options.models_dir, cfg);
    const auto subcarriers = strided_subcarriers(cfg.mmw.num_subcarriers, plan.subcarrier_stride);
    const std::size_t n_m = methods.tags.size();

    RunResult out;
    out.warnings = methods.warnings;
    out.records.resize(plan.cdf.samples * n_m);

    parallel_for(plan.cdf.samples, options.workers, [&](std::size_t i) {
        RngStream channel_rng = RngStream::derive(plan.seed, {cdf_channel, i});
        RngStream noise_rng = RngStream::derive(plan.seed, {cdf_noise, i});
        const DrawnParameters p = draw_parameters(plan.cdf.ranges, channel_rng);
        const Link link = simulate_link(cfg, scenario_from(cfg, p), channel_rng, noise_rng);
        const ChannelTensor truth = link.realization.h_mmw.select(subcarriers);
        const double noise = link.bundle.noise_variance;
        const auto ideals = ideal_links(truth, noise, cfg.total_tx_power);
        const std::uint64_t seed = RngStream::derive_seed(plan.seed, {i});
        for (std::size_t m = 0; m < n_m; ++m)
        {
            const auto est = apply_method(methods.tags[m], methods, link.bundle, link.realization.h_mmw, cfg,
                                          subcarriers);
            MetricRecord &rec = out.records[i * n_m + m];
            rec.method = methods.tags[m];
            rec.snr_db = p.snr_db;
            rec.k_db = p.k_db;
            rec.seed = seed;
            rec.nmse = nmse(truth, est).value;
            rec.se = evaluate_se(est, truth, ideals, noise, cfg.total_tx_power);
        }
    });
    return out;
}

std::string config_hash(const DualBandConfig &cfg)
{
    nlohmann::json j;
    to_json(j, cfg);
    const std::string text = j.dump();
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08x", nn::crc32_of(std::vector<unsigned char>(text.begin(), text.end())));
    return std::string("crc32:") + buf;
}

void generate_dataset(const DualBandConfig &cfg, const DrawRanges &ranges, std::size_t count, std::uint64_t seed,
                      const std::filesystem::path &path, std::size_t workers)
{
    require_valid(cfg);
    validate_ranges(ranges);
    const std::size_t rows = cfg.mmw.num_rx, cols = cfg.mmw.num_tx;
    DatasetWriter writer(path, make_sample_header(rows, cols, count, seed, config_hash(cfg)));
    const std::size_t centre = cfg.mmw.num_subcarriers / 2;

    // Samples are computed in parallel chunks and appended in index order.
    const std::size_t chunk = std::max<std::size_t>(64, 16 * std::max<std::size_t>(workers, 1));
    std::vector<std::vector<float>> records;
    for (std::size_t start = 0; start < count; start += chunk)
    {
        const std::size_t n = std::min(chunk, count - start);
        records.assign(n, {});
        parallel_for(n, workers, [&](std::size_t k) {
            const std::size_t i = start + k;
            RngStream channel_rng = RngStream::derive(seed, {dataset_channel, i});
            RngStream noise_rng = RngStream::derive(seed, {dataset_noise, i});
            const DrawnParameters p = draw_parameters(ranges, channel_rng);
            const Link link = simulate_link(cfg, scenario_from(cfg, p), channel_rng, noise_rng);
            DatasetSample s;
            s.inband = link.bundle.inband[centre];
            s.oob = link.bundle.oob[centre];
            s.k_estimate = link.bundle.k_factor;
            s.noise_variance = link.bundle.noise_variance;
            s.target = link.realization.h_mmw[centre];
            s.k_true = link.realization.scenario.k_mmw;
            s.snr_true = link.realization.scenario.snr_mmw;
            records[k] = encode_sample(s);
        });
        for (const auto &rec : records)
            writer.append(rec);
    }
    writer.finish();
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)> &task)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load())
                return;
            try
            {
                task(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        threads.emplace_back(worker);
    threads.clear();
    if (error)
        std::rethrow_exception(error);
}

std::size_t default_workers()
{
    if (const char *env = std::getenv("DUALBAND_WORKERS"))
    {
        char *end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

} // namespace dualband
