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
#include "dualband/dataset.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <stdexcept>

namespace dualband
{

namespace
{

static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

std::string header_json(const DatasetHeader &h)
{
    nlohmann::ordered_json j;
    j["kind"] = h.kind;
    j["version"] = h.version;
    j["M_Rx"] = h.rows;
    j["M_Tx"] = h.cols;
    j["count"] = h.count;
    j["record_floats"] = h.record_floats;
    j["layout"] = h.layout;
    j["seed"] = h.seed;
    j["config_hash"] = h.config_hash;
    if (h.kind == dataset_kind::parity)
        j["input_channels"] = h.input_channels;
    return j.dump();
}

void check_header(const DatasetHeader &h)
{
    if (h.version != dataset_version)
        throw std::runtime_error("unsupported dataset version " + std::to_string(h.version));
    if (h.rows == 0 || h.cols == 0)
        throw std::runtime_error("dataset header has an empty antenna shape");
    const std::size_t plane = h.rows * h.cols;
    std::size_t expected = 0;
    if (h.kind == dataset_kind::samples)
        expected = sample_record_floats(h.rows, h.cols);
    else if (h.kind == dataset_kind::parity)
        expected = (h.input_channels + 2) * plane;
    else if (h.kind == dataset_kind::inference)
        expected = 2 * plane;
    else
        throw std::runtime_error("unknown dataset kind '" + h.kind + "'");
    if (h.record_floats != expected)
        throw std::runtime_error("record_floats " + std::to_string(h.record_floats) + " does not match " + h.kind +
                                 " layout (" + std::to_string(expected) + ")");
}

void put_plane(std::vector<float> &out, const ComplexMatrix &m, bool imag)
{
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out.push_back(static_cast<float>(imag ? m(i, j).imag() : m(i, j).real()));
}

void put_constant(std::vector<float> &out, std::size_t plane, double v)
{
    out.insert(out.end(), plane, static_cast<float>(v));
}

ComplexMatrix get_complex(std::span<const float> rec, std::size_t plane_re, std::size_t rows, std::size_t cols)
{
    const std::size_t plane = rows * cols;
    ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                cdouble(rec[plane_re * plane + i * cols + j], rec[(plane_re + 1) * plane + i * cols + j]);
    return m;
}

DatasetHeader parse_header(std::istream &in, const std::filesystem::path &path, std::uint32_t &header_len)
{
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != dataset_magic)
        throw std::runtime_error(path.string() + ": not a dualband dataset file");
    unsigned char len_bytes[4];
    in.read(reinterpret_cast<char *>(len_bytes), 4);
    if (!in)
        throw std::runtime_error(path.string() + ": truncated header");
    header_len = static_cast<std::uint32_t>(len_bytes[0]) | (static_cast<std::uint32_t>(len_bytes[1]) << 8) |
                 (static_cast<std::uint32_t>(len_bytes[2]) << 16) | (static_cast<std::uint32_t>(len_bytes[3]) << 24);
    std::string text(header_len, '\0');
    in.read(text.data(), header_len);
    if (!in)
        throw std::runtime_error(path.string() + ": truncated header");
    DatasetHeader h;
    try
    {
        const auto j = nlohmann::json::parse(text);
        h.kind = j.at("kind").get<std::string>();
        h.version = j.at("version").get<int>();
        h.rows = j.at("M_Rx").get<std::size_t>();
        h.cols = j.at("M_Tx").get<std::size_t>();
        h.count = j.at("count").get<std::size_t>();
        h.record_floats = j.at("record_floats").get<std::size_t>();
        h.layout = j.at("layout").get<std::string>();
        h.seed = j.at("seed").get<std::uint64_t>();
        h.config_hash = j.at("config_hash").get<std::string>();
        if (j.contains("input_channels"))
            h.input_channels = j.at("input_channels").get<std::size_t>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw std::runtime_error(path.string() + ": malformed header: " + e.what());
    }
    check_header(h);
    return h;
}

} // namespace

std::size_t sample_record_floats(std::size_t rows, std::size_t cols) { return 8 * rows * cols + 2; }

std::string sample_layout()
{
    return "re_inband,im_inband,re_oob,im_oob,k_est,noise_var,re_target,im_target:planes;k_true,snr_true:scalars";
}

DatasetHeader make_sample_header(std::size_t rows, std::size_t cols, std::size_t count, std::uint64_t seed,
                                 const std::string &config_hash)
{
    DatasetHeader h;
    h.kind = dataset_kind::samples;
    h.rows = rows;
    h.cols = cols;
    h.count = count;
    h.record_floats = sample_record_floats(rows, cols);
    h.layout = sample_layout();
    h.seed = seed;
    h.config_hash = config_hash;
    return h;
}

DatasetHeader make_parity_header(std::size_t input_channels, std::size_t rows, std::size_t cols, std::size_t count,
                                 std::uint64_t seed)
{
    DatasetHeader h;
    h.kind = dataset_kind::parity;
    h.rows = rows;
    h.cols = cols;
    h.count = count;
    h.input_channels = input_channels;
    h.record_floats = (input_channels + 2) * rows * cols;
    h.layout = "input[" + std::to_string(input_channels) + "]:planes;re_output,im_output:planes";
    h.seed = seed;
    return h;
}

DatasetHeader make_inference_header(std::size_t rows, std::size_t cols, std::size_t count)
{
    DatasetHeader h;
    h.kind = dataset_kind::inference;
    h.rows = rows;
    h.cols = cols;
    h.count = count;
    h.record_floats = 2 * rows * cols;
    h.layout = "re_estimate,im_estimate:planes";
    return h;
}

std::vector<float> encode_sample(const DatasetSample &s)
{
    const auto rows = static_cast<std::size_t>(s.target.rows());
    const auto cols = static_cast<std::size_t>(s.target.cols());
    if (s.inband.rows() != s.target.rows() || s.inband.cols() != s.target.cols() || s.oob.rows() != s.target.rows() ||
        s.oob.cols() != s.target.cols())
        throw std::invalid_argument("encode_sample: matrices differ in shape");
    const std::size_t plane = rows * cols;
    std::vector<float> out;
    out.reserve(sample_record_floats(rows, cols));
    put_plane(out, s.inband, false);
    put_plane(out, s.inband, true);
    put_plane(out, s.oob, false);
    put_plane(out, s.oob, true);
    put_constant(out, plane, s.k_estimate);
    put_constant(out, plane, s.noise_variance);
    put_plane(out, s.target, false);
    put_plane(out, s.target, true);
    out.push_back(static_cast<float>(s.k_true));
    out.push_back(static_cast<float>(s.snr_true));
    return out;
}

DatasetSample decode_sample(std::span<const float> rec, std::size_t rows, std::size_t cols)
{
    if (rec.size() != sample_record_floats(rows, cols))
        throw std::invalid_argument("decode_sample: record length does not match the antenna shape");
    const std::size_t plane = rows * cols;
    DatasetSample s;
    s.inband = get_complex(rec, 0, rows, cols);
    s.oob = get_complex(rec, 2, rows, cols);
    s.k_estimate = rec[4 * plane];
    s.noise_variance = rec[5 * plane];
    s.target = get_complex(rec, 6, rows, cols);
    s.k_true = rec[8 * plane];
    s.snr_true = rec[8 * plane + 1];
    return s;
}

DatasetWriter::DatasetWriter(std::filesystem::path path, DatasetHeader header)
    : path_(std::move(path)), header_(std::move(header))
{
    check_header(header_);
    tmp_ = path_;
    tmp_ += ".tmp";
    if (path_.has_parent_path())
        std::filesystem::create_directories(path_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_)
        throw std::runtime_error("cannot write " + tmp_.string());
    const std::string text = header_json(header_);
    const auto len = static_cast<std::uint32_t>(text.size());
    const unsigned char len_bytes[4] = {static_cast<unsigned char>(len), static_cast<unsigned char>(len >> 8),
                                        static_cast<unsigned char>(len >> 16), static_cast<unsigned char>(len >> 24)};
    out_.write(dataset_magic.data(), dataset_magic.size());
    out_.write(reinterpret_cast<const char *>(len_bytes), 4);
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out_)
        throw std::runtime_error("write failed for " + tmp_.string());
}

DatasetWriter::~DatasetWriter()
{
    if (!finished_)
    {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void DatasetWriter::append(std::span<const float> record)
{
    if (finished_)
        throw std::logic_error("DatasetWriter::append after finish");
    if (record.size() != header_.record_floats)
        throw std::invalid_argument("DatasetWriter::append: record has " + std::to_string(record.size()) +
                                    " values, expected " + std::to_string(header_.record_floats));
    if (written_ >= header_.count)
        throw std::logic_error("DatasetWriter::append: more records than declared in the header");
    out_.write(reinterpret_cast<const char *>(record.data()), static_cast<std::streamsize>(record.size_bytes()));
    if (!out_)
        throw std::runtime_error("write failed for " + tmp_.string());
    ++written_;
}

void DatasetWriter::finish()
{
    if (finished_)
        return;
    if (written_ != header_.count)
        throw std::logic_error("DatasetWriter::finish: " + std::to_string(written_) + " of " +
                               std::to_string(header_.count) + " records written");
    out_.flush();
    out_.close();
    if (!out_)
        throw std::runtime_error("write failed for " + tmp_.string());
    std::filesystem::rename(tmp_, path_);
    finished_ = true;
}

std::span<const float> DatasetFile::record(std::size_t i) const
{
    if (i >= header.count)
        throw std::out_of_range("DatasetFile::record: index out of range");
    return std::span<const float>(values).subspan(i * header.record_floats, header.record_floats);
}

DatasetHeader read_dataset_header(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::uint32_t len = 0;
    return parse_header(in, path, len);
}

DatasetFile read_dataset(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::uint32_t len = 0;
    DatasetFile f;
    f.header = parse_header(in, path, len);
    const auto file_size = std::filesystem::file_size(path);
    const std::uintmax_t payload = f.header.count * f.header.record_floats * sizeof(float);
    if (file_size != dataset_magic.size() + 4 + len + payload)
        throw std::runtime_error(path.string() + ": file length does not match header count " +
                                 std::to_string(f.header.count));
    f.values.resize(f.header.count * f.header.record_floats);
    in.read(reinterpret_cast<char *>(f.values.data()), static_cast<std::streamsize>(payload));
    if (!in)
        throw std::runtime_error(path.string() + ": truncated records");
    return f;
}

} // namespace dualband
