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
#include "dualband/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dualband
{

namespace
{

const char *csv_header = "method,snr_db,k_db,seed,nmse,se";

std::ofstream open_out(const std::filesystem::path &path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    return out;
}

void check_written(std::ofstream &out, const std::filesystem::path &path)
{
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> split_csv(const std::string &line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_double(const std::string &s)
{
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::runtime_error("malformed number '" + s + "'");
    return v;
}

std::optional<double> parse_optional(const std::string &s)
{
    if (s.empty())
        return std::nullopt;
    return parse_double(s);
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

NmseResult nmse(const ChannelTensor &truth, const ChannelTensor &estimate)
{
    if (!truth.same_shape(estimate))
        throw std::invalid_argument("nmse: truth and estimate dimensions differ");
    NmseResult out;
    double sum = 0.0;
    for (std::size_t n = 0; n < truth.size(); ++n)
    {
        const double power = truth[n].squaredNorm();
        if (power == 0.0)
        {
            ++out.excluded;
            continue;
        }
        sum += (truth[n] - estimate[n]).squaredNorm() / power;
        ++out.used;
    }
    out.value = out.used ? sum / static_cast<double>(out.used) : 0.0;
    return out;
}

NmseResult nmse(const std::vector<ChannelTensor> &truth, const std::vector<ChannelTensor> &estimate)
{
    if (truth.size() != estimate.size())
        throw std::invalid_argument("nmse: realization counts differ");
    NmseResult out;
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
    {
        const auto r = nmse(truth[i], estimate[i]);
        sum += r.value * static_cast<double>(r.used);
        out.used += r.used;
        out.excluded += r.excluded;
    }
    out.value = out.used ? sum / static_cast<double>(out.used) : 0.0;
    return out;
}

void write_records_csv(const std::filesystem::path &path, const std::vector<MetricRecord> &records)
{
    auto out = open_out(path);
    out << csv_header << '\n';
    for (const auto &r : records)
    {
        out << r.method << ',' << format_double(r.snr_db) << ',' << format_double(r.k_db) << ',' << r.seed << ',';
        if (r.nmse)
            out << format_double(*r.nmse);
        out << ',';
        if (r.se)
            out << format_double(*r.se);
        out << '\n';
    }
    check_written(out, path);
}

std::vector<MetricRecord> read_records_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != csv_header)
        throw std::runtime_error(path.string() + ": unexpected CSV header");
    std::vector<MetricRecord> out;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        const auto cells = split_csv(line);
        if (cells.size() != 6)
            throw std::runtime_error(path.string() + ": expected 6 columns in '" + line + "'");
        MetricRecord r;
        r.method = cells[0];
        r.snr_db = parse_double(cells[1]);
        r.k_db = parse_double(cells[2]);
        r.seed = std::stoull(cells[3]);
        r.nmse = parse_optional(cells[4]);
        r.se = parse_optional(cells[5]);
        out.push_back(std::move(r));
    }
    return out;
}

void write_records_json(const std::filesystem::path &path, const std::vector<MetricRecord> &records)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &r : records)
    {
        nlohmann::ordered_json j;
        j["method"] = r.method;
        j["snr_db"] = r.snr_db;
        j["k_db"] = r.k_db;
        j["seed"] = r.seed;
        j["nmse"] = r.nmse ? nlohmann::ordered_json(*r.nmse) : nlohmann::ordered_json(nullptr);
        j["se"] = r.se ? nlohmann::ordered_json(*r.se) : nlohmann::ordered_json(nullptr);
        arr.push_back(std::move(j));
    }
    auto out = open_out(path);
    out << arr.dump(1) << '\n';
    check_written(out, path);
}

std::vector<MetricRecord> read_records_json(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    const auto arr = nlohmann::json::parse(in);
    std::vector<MetricRecord> out;
    for (const auto &j : arr)
    {
        MetricRecord r;
        r.method = j.at("method").get<std::string>();
        r.snr_db = j.at("snr_db").get<double>();
        r.k_db = j.at("k_db").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        if (!j.at("nmse").is_null())
            r.nmse = j.at("nmse").get<double>();
        if (!j.at("se").is_null())
            r.se = j.at("se").get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

void export_results(const std::filesystem::path &path, const std::vector<MetricRecord> &records, RecordFormat format)
{
    if (format == RecordFormat::csv)
        write_records_csv(path, records);
    else
        write_records_json(path, records);
}

double median(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("median: no values");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    std::vector<CdfPoint> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out.push_back({values[i], static_cast<double>(i + 1) / static_cast<double>(values.size())});
    return out;
}

CellSummary summarize(const std::vector<double> &values)
{
    CellSummary s;
    s.count = values.size();
    if (values.empty())
        return s;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / static_cast<double>(s.count);
    double ss = 0.0;
    for (double v : values)
        ss += (v - s.mean) * (v - s.mean);
    s.stddev = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;
    const double half = 1.96 * s.stddev / std::sqrt(static_cast<double>(s.count));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    return s;
}

Aggregate aggregate(const std::vector<MetricRecord> &records, Metric metric)
{
    Aggregate out;
    std::map<std::tuple<std::string, double, double>, std::vector<double>> cells;
    std::map<std::string, std::vector<double>> per_method;
    for (const auto &r : records)
    {
        const auto &value = metric == Metric::nmse ? r.nmse : r.se;
        if (!value)
            continue;
        cells[{r.method, r.snr_db, r.k_db}].push_back(*value);
        per_method[r.method].push_back(*value);
    }
    for (const auto &[key, values] : cells)
    {
        const auto &[method, snr, k] = key;
        if (values.size() < 2)
        {
            out.warnings.push_back("cell (" + method + ", snr " + format_double(snr) + " dB, K " + format_double(k) +
                                   " dB) has fewer than 2 records; omitted");
            continue;
        }
        CellSummary s = summarize(values);
        s.method = method;
        s.snr_db = snr;
        s.k_db = k;
        out.cells.push_back(s);
    }
    for (const auto &[method, values] : per_method)
    {
        out.cdf[method] = empirical_cdf(values);
        out.median[method] = median(values);
    }
    return out;
}

void write_summary_csv(const std::filesystem::path &path, const std::vector<CellSummary> &cells)
{
    auto out = open_out(path);
    out << "method,snr_db,k_db,count,mean,stddev,ci_low,ci_high\n";
    for (const auto &c : cells)
        out << c.method << ',' << format_double(c.snr_db) << ',' << format_double(c.k_db) << ',' << c.count << ','
            << format_double(c.mean) << ',' << format_double(c.stddev) << ',' << format_double(c.ci_low) << ','
            << format_double(c.ci_high) << '\n';
    check_written(out, path);
}

std::vector<CellSummary> summarize_by_method(const std::vector<MetricRecord> &records, Metric metric)
{
    std::map<std::string, std::vector<double>> per_method;
    for (const auto &r : records)
    {
        const auto &value = metric == Metric::nmse ? r.nmse : r.se;
        if (value)
            per_method[r.method].push_back(*value);
    }
    std::vector<CellSummary> out;
    for (const auto &[method, values] : per_method)
    {
        CellSummary s = summarize(values);
        s.method = method;
        out.push_back(s);
    }
    return out;
}

void write_method_summary_csv(const std::filesystem::path &path, const std::vector<CellSummary> &per_method)
{
    auto out = open_out(path);
    out << "method,count,mean,stddev,ci_low,ci_high\n";
    for (const auto &c : per_method)
        out << c.method << ',' << c.count << ',' << format_double(c.mean) << ',' << format_double(c.stddev) << ','
            << format_double(c.ci_low) << ',' << format_double(c.ci_high) << '\n';
    check_written(out, path);
}

void write_cdf_csv(const std::filesystem::path &path, const std::map<std::string, std::vector<CdfPoint>> &cdf)
{
    auto out = open_out(path);
    out << "method,value,cdf\n";
    for (const auto &[method, points] : cdf)
        for (const auto &p : points)
            out << method << ',' << format_double(p.value) << ',' << format_double(p.probability) << '\n';
    check_written(out, path);
}

void write_medians_csv(const std::filesystem::path &path, const std::map<std::string, double> &medians)
{
    auto out = open_out(path);
    out << "method,median\n";
    for (const auto &[method, m] : medians)
        out << method << ',' << format_double(m) << '\n';
    check_written(out, path);
}

} // namespace dualband
