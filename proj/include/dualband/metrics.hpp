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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace dualband
{

struct NmseResult
{
    double value = 0.0;
    std::size_t used = 0;     // slices that entered the mean
    std::size_t excluded = 0; // zero-norm truth slices
};

// Mean over subcarriers (and over all given realizations) of |H - H_est|_F^2 / |H|_F^2.
// Slices whose truth has zero norm are skipped and counted in `excluded`.
NmseResult nmse(const ChannelTensor &truth, const ChannelTensor &estimate);
NmseResult nmse(const std::vector<ChannelTensor> &truth, const std::vector<ChannelTensor> &estimate);

// One evaluated (method, realization) pair.
struct MetricRecord
{
    std::string method;
    double snr_db = 0.0;
    double k_db = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> nmse;
    std::optional<double> se; // bits/s/Hz

    bool operator==(const MetricRecord &) const = default;
};

// CSV column order: method,snr_db,k_db,seed,nmse,se. Numbers use 17 significant digits,
// absent values are empty cells.
void write_records_csv(const std::filesystem::path &path, const std::vector<MetricRecord> &records);
std::vector<MetricRecord> read_records_csv(const std::filesystem::path &path);
void write_records_json(const std::filesystem::path &path, const std::vector<MetricRecord> &records);
std::vector<MetricRecord> read_records_json(const std::filesystem::path &path);

enum class RecordFormat
{
    csv,
    json
};
void export_results(const std::filesystem::path &path, const std::vector<MetricRecord> &records, RecordFormat format);

struct CellSummary
{
    std::string method;
    double snr_db = 0.0;
    double k_db = 0.0;
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double ci_low = 0.0; // mean -/+ 1.96 s / sqrt(n)
    double ci_high = 0.0;
};

struct CdfPoint
{
    double value = 0.0;
    double probability = 0.0;
};

struct Aggregate
{
    std::vector<CellSummary> cells;                        // per (method, snr, k)
    std::map<std::string, std::vector<CdfPoint>> cdf;      // per method
    std::map<std::string, double> median;                  // per method
    std::vector<std::string> warnings;
};

enum class Metric
{
    nmse,
    se
};

// Cells with fewer than two values are omitted with a warning.
Aggregate aggregate(const std::vector<MetricRecord> &records, Metric metric);

double median(std::vector<double> values);
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);
CellSummary summarize(const std::vector<double> &values);

void write_summary_csv(const std::filesystem::path &path, const std::vector<CellSummary> &cells);
// Columns method,count,mean,stddev,ci_low,ci_high; snr_db and k_db of the cells are ignored.
void write_method_summary_csv(const std::filesystem::path &path, const std::vector<CellSummary> &per_method);
// One summary per method over all records carrying the metric.
std::vector<CellSummary> summarize_by_method(const std::vector<MetricRecord> &records, Metric metric);
void write_cdf_csv(const std::filesystem::path &path, const std::map<std::string, std::vector<CdfPoint>> &cdf);
void write_medians_csv(const std::filesystem::path &path, const std::map<std::string, double> &medians);

std::string format_double(double v);

} // namespace dualband
