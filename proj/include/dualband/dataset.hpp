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

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace dualband
{

// File layout: 8-byte magic, u32 little-endian header length, JSON header of that many bytes,
// then `count` records of `record_floats` float32 little-endian values.
inline constexpr std::array<char, 8> dataset_magic{'D', 'B', 'C', 'E', 'D', 'A', 'T', 'A'};
inline constexpr int dataset_version = 1;

namespace dataset_kind
{
inline constexpr const char *samples = "samples";
inline constexpr const char *parity = "parity";
inline constexpr const char *inference = "inference";
} // namespace dataset_kind

struct DatasetHeader
{
    std::string kind = dataset_kind::samples;
    int version = dataset_version;
    std::size_t rows = 0; // M_Rx
    std::size_t cols = 0; // M_Tx
    std::size_t count = 0;
    std::size_t record_floats = 0;
    std::string layout;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::size_t input_channels = 0; // parity files only

    bool operator==(const DatasetHeader &) const = default;
};

// (6 + 2) M_Rx M_Tx + 2
std::size_t sample_record_floats(std::size_t rows, std::size_t cols);
std::string sample_layout();

DatasetHeader make_sample_header(std::size_t rows, std::size_t cols, std::size_t count, std::uint64_t seed,
                                 const std::string &config_hash);
DatasetHeader make_parity_header(std::size_t input_channels, std::size_t rows, std::size_t cols, std::size_t count,
                                 std::uint64_t seed);
DatasetHeader make_inference_header(std::size_t rows, std::size_t cols, std::size_t count);

// One training sample at the central subcarrier.
struct DatasetSample
{
    ComplexMatrix inband;        // H~(m)[n_c]
    ComplexMatrix oob;           // H^(m)[n_c]
    double k_estimate = 0.0;     // K~(s), linear
    double noise_variance = 0.0; // sigma_w^2
    ComplexMatrix target;        // H(m)[n_c]
    double k_true = 0.0;         // K(m), linear
    double snr_true = 0.0;       // gamma(m), linear
};

std::vector<float> encode_sample(const DatasetSample &sample);
DatasetSample decode_sample(std::span<const float> record, std::size_t rows, std::size_t cols);

// Writes to `<path>.tmp` and renames on finish(); an unfinished writer removes its temp file.
class DatasetWriter
{
public:
    DatasetWriter(std::filesystem::path path, DatasetHeader header);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter &) = delete;
    DatasetWriter &operator=(const DatasetWriter &) = delete;

    void append(std::span<const float> record);
    void finish();

    [[nodiscard]] std::size_t written() const { return written_; }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    DatasetHeader header_;
    std::ofstream out_;
    std::size_t written_ = 0;
    bool finished_ = false;
};

struct DatasetFile
{
    DatasetHeader header;
    std::vector<float> values; // count * record_floats

    [[nodiscard]] std::span<const float> record(std::size_t i) const;
};

// Validates the magic, header fields, and that the record count matches the file length.
DatasetFile read_dataset(const std::filesystem::path &path);
DatasetHeader read_dataset_header(const std::filesystem::path &path);

} // namespace dualband
