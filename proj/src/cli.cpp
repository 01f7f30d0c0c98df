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
#include "dualband/experiments.hpp"
#include "dualband/metrics.hpp"
#include "dualband/nn.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dualband::cli
{

namespace
{

std::filesystem::path sibling(const std::filesystem::path &out, const std::string &suffix)
{
    return out.parent_path() / (out.stem().string() + suffix + ".csv");
}

RecordFormat format_for(const std::filesystem::path &path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".json")
        return RecordFormat::json;
    if (ext == ".csv")
        return RecordFormat::csv;
    throw ConfigException({ConfigError{"out", "output must end in .csv or .json"}});
}

void print_warnings(const std::vector<std::string> &warnings, std::ostream &err)
{
    for (const auto &w : warnings)
        err << "warning: " << w << '\n';
}

DualBandConfig config_or_reference(const std::string &path)
{
    if (path.empty())
        return DualBandConfig::reference();
    auto cfg = load_config(path);
    require_valid(cfg);
    return cfg;
}

// Relative 2-norm error of one output record against its reference.
double relative_error(const ComplexMatrix &y, std::span<const float> reference)
{
    const auto plane = static_cast<std::size_t>(y.size());
    double diff = 0.0, norm = 0.0;
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j)
        {
            const std::size_t k = static_cast<std::size_t>(i * y.cols() + j);
            const cdouble ref(reference[k], reference[plane + k]);
            diff += std::norm(y(i, j) - ref);
            norm += std::norm(ref);
        }
    return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Dual-band mmWave channel estimation simulator", "dualband-sim"};
    app.require_subcommand(1);

    // dataset
    std::size_t ds_count = 0;
    std::string ds_out, ds_ranges, ds_config;
    std::uint64_t ds_seed = 1;
    auto *dataset = app.add_subcommand("dataset", "Generate a training/test dataset file");
    dataset->add_option("--count", ds_count, "Number of samples")->required();
    dataset->add_option("--out", ds_out, "Output dataset file")->required();
    dataset->add_option("--ranges", ds_ranges, "Draw ranges, e.g. snr_db=-20:10,k_db=-20:30,angle_deg=-90:90");
    dataset->add_option("--seed", ds_seed, "Root seed");
    dataset->add_option("--config", ds_config, "Band configuration JSON");

    // sweep / cdf
    std::string plan_path, models_dir, results_out;
    std::uint64_t plan_seed = 0;
    auto *sweep = app.add_subcommand("sweep", "NMSE versus SNR sweep");
    auto *cdf = app.add_subcommand("cdf", "Spectral-efficiency CDF experiment");
    for (auto *sub : {sweep, cdf})
    {
        sub->add_option("--plan", plan_path, "Experiment plan JSON")->required();
        sub->add_option("--models-dir", models_dir, "Directory holding <method>.json model packages");
        sub->add_option("--out", results_out, "Records file (.csv or .json)")->required();
        sub->add_option("--seed", plan_seed, "Override the plan seed");
    }

    // infer
    std::string model_path, input_path, infer_out;
    auto *infer = app.add_subcommand("infer", "Run a model over a dataset or parity file");
    infer->add_option("--model", model_path, "Model manifest")->required();
    infer->add_option("--input", input_path, "Dataset or parity file")->required();
    infer->add_option("--out", infer_out, "Output inference file")->required();

    // validate-model
    std::string parity_path, vm_config;
    std::size_t vm_rows = 0, vm_cols = 0;
    double tolerance = 1e-4;
    auto *validate = app.add_subcommand("validate-model", "Load and check a model package");
    validate->add_option("--model", model_path, "Model manifest")->required();
    validate->add_option("--parity", parity_path, "Parity file to reproduce");
    validate->add_option("--tolerance", tolerance, "Relative error bound for parity vectors");
    validate->add_option("--rows", vm_rows, "Runtime M_Rx");
    validate->add_option("--cols", vm_cols, "Runtime M_Tx");
    validate->add_option("--config", vm_config, "Band configuration providing the runtime shape");

    // init-model
    std::string arch = "cnn", variant = "oob", init_out;
    std::size_t init_rows = 8, init_cols = 8;
    std::uint64_t init_seed = 1;
    double in_scale = 1.0, out_scale = 1.0;
    bool zero = false;
    auto *init = app.add_subcommand("init-model", "Write a reference architecture with random or zero weights");
    init->add_option("--arch", arch, "cnn or unet")->check(CLI::IsMember({"cnn", "unet"}));
    init->add_option("--variant", variant, "oob or inband")->check(CLI::IsMember({"oob", "inband"}));
    init->add_option("--rows", init_rows, "M_Rx");
    init->add_option("--cols", init_cols, "M_Tx");
    init->add_option("--seed", init_seed, "Parameter seed");
    init->add_option("--input-scale", in_scale, "s_in");
    init->add_option("--output-scale", out_scale, "s_out");
    init->add_flag("--zero", zero, "Keep zero-initialised weights");
    init->add_option("--out", init_out, "Output manifest")->required();

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::ParseError &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    }

    try
    {
        if (dataset->parsed())
        {
            const auto cfg = config_or_reference(ds_config);
            const DrawRanges ranges = ds_ranges.empty() ? DrawRanges{} : parse_ranges(ds_ranges);
            generate_dataset(cfg, ranges, ds_count, ds_seed, ds_out, default_workers());
            out << "wrote " << ds_count << " samples to " << ds_out << '\n';
        }
        else if (sweep->parsed() || cdf->parsed())
        {
            auto plan = load_plan(plan_path);
            if (plan_seed != 0)
                plan.seed = plan_seed;
            const auto format = format_for(results_out);
            RunOptions opts{models_dir, default_workers()};
            const bool is_cdf = cdf->parsed();
            const RunResult result = is_cdf ? run_se_cdf(plan, opts) : run_nmse_sweep(plan, opts);
            print_warnings(result.warnings, err);
            export_results(results_out, result.records, format);
            const auto agg = aggregate(result.records, is_cdf ? Metric::se : Metric::nmse);
            if (is_cdf)
            {
                // Every sample has its own (SNR, K), so summaries are per method only.
                write_method_summary_csv(sibling(results_out, "_summary"),
                                         summarize_by_method(result.records, Metric::se));
                write_cdf_csv(sibling(results_out, "_cdf"), agg.cdf);
                write_medians_csv(sibling(results_out, "_medians"), agg.median);
                for (const auto &[method, m] : agg.median)
                    out << method << " median SE " << format_double(m) << '\n';
            }
            else
            {
                print_warnings(agg.warnings, err);
                write_summary_csv(sibling(results_out, "_summary"), agg.cells);
            }
            out << "wrote " << result.records.size() << " records to " << results_out << '\n';
        }
        else if (infer->parsed())
        {
            const DatasetFile input = read_dataset(input_path);
            const auto model =
                nn::load_model(model_path, nn::RuntimeShape{input.header.rows, input.header.cols});
            DatasetWriter writer(infer_out, make_inference_header(model.rows, model.cols, input.header.count));
            std::vector<float> rec;
            for (std::size_t i = 0; i < input.header.count; ++i)
            {
                ComplexMatrix y;
                if (input.header.kind == dataset_kind::samples)
                {
                    const auto s = decode_sample(input.record(i), input.header.rows, input.header.cols);
                    y = nn::forward(model, nn::assemble_input(model, s.inband, &s.oob, s.k_estimate,
                                                              s.noise_variance));
                }
                else if (input.header.kind == dataset_kind::parity)
                {
                    if (input.header.input_channels != model.input_channels)
                        throw nn::ModelError(nn::ModelErrorCode::shape_mismatch,
                                             "parity inputs have a different channel count than the model");
                    nn::FeatureTensor x(model.input_channels, model.rows, model.cols);
                    const auto r = input.record(i);
                    std::copy(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(x.values().size()),
                              x.values().begin());
                    y = nn::forward(model, x);
                }
                else
                    throw std::runtime_error("infer: unsupported input kind '" + input.header.kind + "'");
                rec.clear();
                for (Eigen::Index r = 0; r < y.rows(); ++r)
                    for (Eigen::Index c = 0; c < y.cols(); ++c)
                        rec.push_back(static_cast<float>(y(r, c).real()));
                for (Eigen::Index r = 0; r < y.rows(); ++r)
                    for (Eigen::Index c = 0; c < y.cols(); ++c)
                        rec.push_back(static_cast<float>(y(r, c).imag()));
                writer.append(rec);
            }
            writer.finish();
            out << "wrote " << input.header.count << " estimates to " << infer_out << '\n';
        }
        else if (validate->parsed())
        {
            std::optional<nn::RuntimeShape> runtime;
            if (!vm_config.empty())
            {
                const auto cfg = config_or_reference(vm_config);
                runtime = nn::RuntimeShape{cfg.mmw.num_rx, cfg.mmw.num_tx};
            }
            else if (vm_rows || vm_cols)
                runtime = nn::RuntimeShape{vm_rows, vm_cols};
            const auto model = nn::load_model(model_path, runtime);
            out << "model ok: " << nn::to_string(model.architecture) << "/" << nn::to_string(model.variant) << ", "
                << model.rows << "x" << model.cols << ", " << model.layers.size() << " layers\n";
            if (!parity_path.empty())
            {
                const DatasetFile parity = read_dataset(parity_path);
                if (parity.header.kind != dataset_kind::parity || parity.header.input_channels != model.input_channels ||
                    parity.header.rows != model.rows || parity.header.cols != model.cols)
                    throw nn::ModelError(nn::ModelErrorCode::shape_mismatch,
                                         "parity file does not match the model input shape");
                const std::size_t in_floats = model.input_channels * model.rows * model.cols;
                double worst = 0.0;
                std::size_t failures = 0;
                for (std::size_t i = 0; i < parity.header.count; ++i)
                {
                    const auto r = parity.record(i);
                    nn::FeatureTensor x(model.input_channels, model.rows, model.cols);
                    std::copy(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(in_floats), x.values().begin());
                    const double e = relative_error(nn::forward(model, x), r.subspan(in_floats));
                    worst = std::max(worst, e);
                    if (!(e <= tolerance))
                        ++failures;
                }
                out << "parity: " << parity.header.count - failures << "/" << parity.header.count
                    << " vectors within " << format_double(tolerance) << " (max relative error "
                    << format_double(worst) << ")\n";
                if (failures)
                    return exit_runtime_error;
            }
        }
        else if (init->parsed())
        {
            const auto v = variant == "oob" ? nn::Variant::oob : nn::Variant::inband;
            auto model = arch == "cnn" ? nn::make_cnn(v, init_rows, init_cols) : nn::make_unet(v, init_rows, init_cols);
            if (!zero)
                nn::randomize_parameters(model, init_seed);
            model.input_scale = in_scale;
            model.output_scale = out_scale;
            nn::save_model(model, init_out);
            out << "wrote " << init_out << '\n';
        }
    }
    catch (const ConfigException &e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_runtime_error;
    }
    return exit_ok;
}

} // namespace dualband::cli
