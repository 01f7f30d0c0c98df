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
#include "dualband/cli.hpp"
#include "dualband/config.hpp"
#include "dualband/dataset.hpp"
#include "dualband/estimators.hpp"
#include "dualband/experiments.hpp"
#include "dualband/nn.hpp"
#include "dualband/precoding.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace dualband;

namespace
{

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Same keys as the JSON header on disk.
py::dict header_to_dict(const DatasetHeader &h)
{
    py::dict d;
    d["kind"] = h.kind;
    d["version"] = h.version;
    d["M_Rx"] = h.rows;
    d["M_Tx"] = h.cols;
    d["count"] = h.count;
    d["record_floats"] = h.record_floats;
    d["layout"] = h.layout;
    d["seed"] = h.seed;
    d["config_hash"] = h.config_hash;
    if (h.kind == dataset_kind::parity)
        d["input_channels"] = h.input_channels;
    return d;
}

py::tuple read_dataset_py(const std::filesystem::path &path)
{
    DatasetFile f = read_dataset(path);
    FloatArray records({f.header.count, f.header.record_floats});
    std::copy(f.values.begin(), f.values.end(), records.mutable_data());
    return py::make_tuple(header_to_dict(f.header), records);
}

void write_records(const std::filesystem::path &path, const DatasetHeader &header, const FloatArray &records)
{
    if (records.ndim() != 2 || static_cast<std::size_t>(records.shape(0)) != header.count ||
        static_cast<std::size_t>(records.shape(1)) != header.record_floats)
        throw std::invalid_argument("records must have shape (" + std::to_string(header.count) + ", " +
                                    std::to_string(header.record_floats) + ")");
    DatasetWriter writer(path, header);
    for (std::size_t i = 0; i < header.count; ++i)
        writer.append(std::span<const float>(records.data(static_cast<py::ssize_t>(i), 0), header.record_floats));
    writer.finish();
}

// inputs (count, C, H, W), outputs (count, 2, H, W)
void write_parity_py(const std::filesystem::path &path, const FloatArray &inputs, const FloatArray &outputs,
                     std::uint64_t seed)
{
    if (inputs.ndim() != 4 || outputs.ndim() != 4 || inputs.shape(0) != outputs.shape(0) || outputs.shape(1) != 2 ||
        inputs.shape(2) != outputs.shape(2) || inputs.shape(3) != outputs.shape(3))
        throw std::invalid_argument("parity inputs must be (count, C, H, W) and outputs (count, 2, H, W)");
    const auto count = static_cast<std::size_t>(inputs.shape(0));
    const auto c = static_cast<std::size_t>(inputs.shape(1));
    const auto rows = static_cast<std::size_t>(inputs.shape(2));
    const auto cols = static_cast<std::size_t>(inputs.shape(3));
    const std::size_t in_floats = c * rows * cols, out_floats = 2 * rows * cols;
    DatasetWriter writer(path, make_parity_header(c, rows, cols, count, seed));
    std::vector<float> rec(in_floats + out_floats);
    for (std::size_t i = 0; i < count; ++i)
    {
        const float *x = inputs.data() + i * in_floats;
        const float *y = outputs.data() + i * out_floats;
        std::copy(x, x + in_floats, rec.begin());
        std::copy(y, y + out_floats, rec.begin() + static_cast<std::ptrdiff_t>(in_floats));
        writer.append(rec);
    }
    writer.finish();
}

nn::FeatureTensor to_features(const nn::ModelPackage &m, const DoubleArray &x)
{
    if (x.ndim() != 3 || static_cast<std::size_t>(x.shape(0)) != m.input_channels ||
        static_cast<std::size_t>(x.shape(1)) != m.rows || static_cast<std::size_t>(x.shape(2)) != m.cols)
        throw std::invalid_argument("input must have shape (" + std::to_string(m.input_channels) + ", " +
                                    std::to_string(m.rows) + ", " + std::to_string(m.cols) + ")");
    nn::FeatureTensor t(m.input_channels, m.rows, m.cols);
    std::copy(x.data(), x.data() + x.size(), t.values().begin());
    return t;
}

py::array_t<std::complex<double>> forward_py(const nn::ModelPackage &m, const DoubleArray &x)
{
    const ComplexMatrix h = nn::forward(m, to_features(m, x));
    py::array_t<std::complex<double>> out({h.rows(), h.cols()});
    auto v = out.mutable_unchecked<2>();
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            v(i, j) = h(i, j);
    return out;
}

py::array_t<double> forward_features_py(const nn::ModelPackage &m, const DoubleArray &x)
{
    const nn::FeatureTensor y = nn::forward_features(m, to_features(m, x));
    py::array_t<double> out({y.channels(), y.height(), y.width()});
    std::copy(y.values().begin(), y.values().end(), out.mutable_data());
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Bindings to the dualband simulator library";

    py::register_exception<nn::ModelError>(m, "ModelError", PyExc_RuntimeError);
    py::register_exception<ConfigException>(m, "ConfigError", PyExc_ValueError);

    py::class_<nn::ModelPackage>(m, "Model")
        .def_property_readonly("architecture", [](const nn::ModelPackage &p) { return nn::to_string(p.architecture); })
        .def_property_readonly("variant", [](const nn::ModelPackage &p) { return nn::to_string(p.variant); })
        .def_readonly("input_channels", &nn::ModelPackage::input_channels)
        .def_readonly("rows", &nn::ModelPackage::rows)
        .def_readonly("cols", &nn::ModelPackage::cols)
        .def_readonly("input_scale", &nn::ModelPackage::input_scale)
        .def_readonly("output_scale", &nn::ModelPackage::output_scale)
        .def_property_readonly("num_layers", [](const nn::ModelPackage &p) { return p.layers.size(); })
        .def_property_readonly("layer_kinds",
                               [](const nn::ModelPackage &p) {
                                   std::vector<std::string> kinds;
                                   for (const auto &l : p.layers)
                                       kinds.push_back(nn::layer_kind(l));
                                   return kinds;
                               })
        .def("forward", &forward_py, py::arg("x"), "Complex (rows, cols) estimate for a (C, rows, cols) input")
        .def("forward_features", &forward_features_py, py::arg("x"), "Raw (2, rows, cols) network output")
        .def(
            "assemble_input",
            [](const nn::ModelPackage &p, const ComplexMatrix &inband, std::optional<ComplexMatrix> oob, double k,
               double s2) {
                const auto t = nn::assemble_input(p, inband, oob ? &*oob : nullptr, k, s2);
                py::array_t<double> out({t.channels(), t.height(), t.width()});
                std::copy(t.values().begin(), t.values().end(), out.mutable_data());
                return out;
            },
            py::arg("inband"), py::arg("oob") = py::none(), py::arg("k_factor") = 0.0,
            py::arg("noise_variance") = 0.0)
        .def("save", [](const nn::ModelPackage &p, const std::filesystem::path &path) { nn::save_model(p, path); });

    m.def(
        "load_model",
        [](const std::filesystem::path &path, std::optional<std::size_t> rows, std::optional<std::size_t> cols) {
            std::optional<nn::RuntimeShape> shape;
            if (rows || cols)
                shape = nn::RuntimeShape{rows.value_or(0), cols.value_or(0)};
            return nn::load_model(path, shape);
        },
        py::arg("path"), py::arg("rows") = py::none(), py::arg("cols") = py::none());

    m.def(
        "make_model",
        [](const std::string &arch, const std::string &variant, std::size_t rows, std::size_t cols,
           std::optional<std::uint64_t> seed) {
            if (arch != "cnn" && arch != "unet")
                throw std::invalid_argument("arch must be 'cnn' or 'unet'");
            if (variant != "oob" && variant != "inband")
                throw std::invalid_argument("variant must be 'oob' or 'inband'");
            const auto v = variant == "oob" ? nn::Variant::oob : nn::Variant::inband;
            auto p = arch == "cnn" ? nn::make_cnn(v, rows, cols) : nn::make_unet(v, rows, cols);
            if (seed)
                nn::randomize_parameters(p, *seed);
            return p;
        },
        py::arg("arch"), py::arg("variant"), py::arg("rows") = 8, py::arg("cols") = 8, py::arg("seed") = py::none(),
        "Reference architecture; zero weights unless a seed is given");

    m.def("read_dataset", &read_dataset_py, py::arg("path"), "(header dict, float32 records array)");
    m.def(
        "write_samples",
        [](const std::filesystem::path &path, std::size_t rows, std::size_t cols, const FloatArray &records,
           std::uint64_t seed, const std::string &hash) {
            write_records(path, make_sample_header(rows, cols, static_cast<std::size_t>(records.shape(0)), seed, hash),
                          records);
        },
        py::arg("path"), py::arg("rows"), py::arg("cols"), py::arg("records"), py::arg("seed") = 0,
        py::arg("config_hash") = "");
    m.def("write_parity", &write_parity_py, py::arg("path"), py::arg("inputs"), py::arg("outputs"),
          py::arg("seed") = 0);
    m.def("sample_record_floats", &sample_record_floats, py::arg("rows"), py::arg("cols"));
    m.def("sample_layout", &sample_layout);

    m.def(
        "generate_dataset",
        [](const std::filesystem::path &path, std::size_t count, std::uint64_t seed, const std::string &ranges,
           std::optional<std::filesystem::path> config, std::size_t workers) {
            DualBandConfig cfg = DualBandConfig::reference();
            if (config)
                cfg = load_config(*config);
            require_valid(cfg);
            const DrawRanges r = ranges.empty() ? DrawRanges{} : parse_ranges(ranges);
            py::gil_scoped_release release;
            generate_dataset(cfg, r, count, seed, path, workers);
        },
        py::arg("path"), py::arg("count"), py::arg("seed") = 1, py::arg("ranges") = "",
        py::arg("config") = py::none(), py::arg("workers") = 1);

    m.def(
        "mrc_weight",
        [](double k, double s2, std::size_t num_tx, std::size_t num_rx, double k_scale) {
            return mrc_weight(k, s2, num_tx, num_rx, k_scale);
        },
        py::arg("k_factor"), py::arg("noise_variance"), py::arg("num_tx") = 8, py::arg("num_rx") = 8,
        py::arg("k_scale") = 1.0);

    m.def(
        "waterfill",
        [](const RealVector &sigma, double noise, double total) {
            const auto r = waterfill(sigma, noise, total);
            return py::make_tuple(RealVector(r.power), r.water_level);
        },
        py::arg("sigma"), py::arg("noise_variance"), py::arg("total_power") = 1.0, "(power, water_level)");

    m.def(
        "run_cli",
        [](const std::vector<std::string> &args) {
            std::ostringstream out, err;
            int rc = 0;
            {
                py::gil_scoped_release release;
                rc = cli::run(args, out, err);
            }
            return py::make_tuple(rc, out.str(), err.str());
        },
        py::arg("args"), "Runs a dualband-sim subcommand; returns (exit code, stdout, stderr)");
}
