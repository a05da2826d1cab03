#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "deepnet/errors.hpp"
#include "deepnet/harness.hpp"
#include "deepnet/model_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace deepnet;

void set_threads(int threads) {
#ifdef _OPENMP
    omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

void print_error(double value) { std::printf("test_error=%.17g\n", value); }

struct TrainArgs {
    std::string config_path;
    std::string out_model;
    std::string curves_prefix;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs_finetune;
    int threads = 1;
};

int cmd_train(const TrainArgs& args) {
    ExperimentConfig cfg = load_experiment_config(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    if (args.epochs_finetune) cfg.epochs_finetune = *args.epochs_finetune;
    set_threads(args.threads);

    DatasetBundle data = load_data(cfg.data);
    ExperimentResult result = run_experiment(cfg, data.train, data.test);

    if (!args.out_model.empty()) {
        save_model({1, cfg.model, result.net}, args.out_model);
        std::fprintf(stderr, "model written to %s\n", args.out_model.c_str());
    }
    if (!args.curves_prefix.empty()) {
        if (!result.finetune_history.empty())
            emit_curves(result.finetune_history, args.curves_prefix + "_finetune.csv");
        for (std::size_t i = 0; i < result.pretrain_report.layers.size(); ++i) {
            TrainingHistory h;
            const auto& curve = result.pretrain_report.layers[i].recon_error;
            for (std::size_t e = 0; e < curve.size(); ++e)
                h.push_back({e + 1, curve[e], std::numeric_limits<double>::quiet_NaN()});
            emit_curves(h, args.curves_prefix + "_pretrain_layer" + std::to_string(i + 1) +
                               ".csv");
        }
    }
    print_error(result.test_error);
    return 0;
}

int cmd_eval(const std::string& model_path, const DataConfig& data_cfg) {
    SavedModel model = load_model(model_path);
    DatasetBundle data = load_data(data_cfg);
    if (data.test.X.cols() != model.net.input_size()) {
        throw ShapeError("model expects " + std::to_string(model.net.input_size()) +
                         " features, data has " + std::to_string(data.test.X.cols()));
    }
    print_error(evaluate(model.net, data.test));
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, int threads) {
    set_threads(threads);
    SweepSpec spec = load_sweep_spec(config_path);
    ExperimentConfig defaults = parse_experiment_config(spec.defaults);
    DatasetBundle data = load_data(defaults.data);
    auto results = run_sweep(spec, data, [](const TrialResult& t) {
        if (t.failed) {
            std::fprintf(stderr, "[trial] %s=%s FAILED: %s\n", t.parameter_name.c_str(),
                         t.value.dump().c_str(), t.error.c_str());
        } else {
            std::fprintf(stderr, "[trial] %s=%s test_error=%.6f (%.1fs)\n",
                         t.parameter_name.c_str(), t.value.dump().c_str(), t.test_error,
                         t.wall_clock_seconds);
        }
    });
    persist_results(results, out_path);
    std::fprintf(stderr, "results written to %s\n", out_path.c_str());
    return 0;
}

int cmd_gradcheck(const std::string& config_path, std::size_t seeds) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < seeds; ++s)
        worst = std::max(worst, run_gradcheck(cfg, cfg.seed + s));
    std::printf("max_relative_error=%.3e\n", worst);
    const bool ok = worst <= 1e-5;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    if (!ok) throw NumericError("gradient check failed");
    return 0;
}

int cmd_resize(const std::string& in_csv, const std::string& out_csv, bool has_header,
               std::size_t rows, std::size_t cols) {
    CsvTable table = load_csv(in_csv, has_header);
    if (rows * cols != table.pixels.cols()) {
        throw ParamError("rows*cols = " + std::to_string(rows * cols) +
                         " does not match CSV row length " +
                         std::to_string(table.pixels.cols()));
    }
    Matrix small = downsample_rows_2x(table.pixels, rows, cols);
    std::ofstream out(out_csv);
    if (!out) throw IoError("cannot write '" + out_csv + "'");
    for (std::size_t i = 0; i < small.rows(); ++i) {
        out << table.labels[i];
        for (std::size_t j = 0; j < small.cols(); ++j) {
            // pixel means of integers; round back to the byte grid
            out << "," << static_cast<long>(std::lround(small(i, j)));
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed for '" + out_csv + "'");
    std::fprintf(stderr, "resized %zux%zu -> %zux%zu, %zu rows\n", rows, cols, rows / 2,
                 cols / 2, small.rows());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deep pre-training toolkit: DBN / stacked autoencoder experiments"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "pre-train, fine-tune and evaluate a model");
    train->add_option("config", train_args.config_path, "experiment config JSON")
        ->required();
    train->add_option("--out", train_args.out_model, "write the trained model here");
    train->add_option("--curves", train_args.curves_prefix,
                      "prefix for training-curve CSV files");
    train->add_option("--seed", train_args.seed, "override config seed");
    train->add_option("--epochs-finetune", train_args.epochs_finetune,
                      "override fine-tuning epochs");
    train->add_option("--threads", train_args.threads, "worker threads (default 1)");

    std::string eval_model;
    DataConfig eval_data;
    auto* eval = app.add_subcommand("eval", "evaluate a saved model on a dataset");
    eval->add_option("--model", eval_model, "model JSON file")->required();
    eval->add_option("--format", eval_data.format, "idx or csv")->default_val("idx");
    eval->add_option("--test-images", eval_data.test_images, "IDX image file");
    eval->add_option("--test-labels", eval_data.test_labels, "IDX label file");
    eval->add_option("--test-csv", eval_data.test_csv, "label-first CSV file");
    eval->add_flag("--has-header", eval_data.has_header, "CSV has a header line");
    eval->add_option("--n-classes", eval_data.n_classes, "label arity")->default_val(10);
    eval->add_option("--n-test", eval_data.n_test, "use only the first N rows");

    std::string sweep_config, sweep_out;
    int sweep_threads = 1;
    auto* sweep = app.add_subcommand("sweep", "independent per-parameter model selection");
    sweep->add_option("config", sweep_config, "sweep config JSON")->required();
    sweep->add_option("--out", sweep_out, "JSON-lines results file")->required();
    sweep->add_option("--threads", sweep_threads, "worker threads (default 1)");

    std::string gc_config;
    std::size_t gc_seeds = 1;
    auto* gradcheck = app.add_subcommand(
        "gradcheck", "compare backpropagation against symmetric finite differences");
    gradcheck->add_option("config", gc_config, "experiment config JSON")->required();
    gradcheck->add_option("--seeds", gc_seeds, "number of random restarts")->default_val(1);

    std::string rz_in, rz_out;
    bool rz_header = false;
    std::size_t rz_rows = 48, rz_cols = 48;
    auto* resize = app.add_subcommand("resize", "bilinearly halve CSV image data");
    resize->add_option("input", rz_in, "input CSV")->required();
    resize->add_option("output", rz_out, "output CSV")->required();
    resize->add_flag("--has-header", rz_header, "input CSV has a header line");
    resize->add_option("--rows", rz_rows, "image rows")->default_val(48);
    resize->add_option("--cols", rz_cols, "image cols")->default_val(48);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (eval->parsed()) {
            if (eval_data.format == "csv" && eval_data.test_csv.empty())
                throw ConfigError("eval with csv needs --test-csv");
            if (eval_data.format == "idx" &&
                (eval_data.test_images.empty() || eval_data.test_labels.empty()))
                throw ConfigError("eval with idx needs --test-images and --test-labels");
            // eval always reads through the test-side fields
            if (eval_data.format == "csv") {
                DataConfig d = eval_data;
                d.train_csv = eval_data.test_csv;
                d.test_csv = eval_data.test_csv;
                return cmd_eval(eval_model, d);
            }
            DataConfig d = eval_data;
            d.train_images = eval_data.test_images;
            d.train_labels = eval_data.test_labels;
            return cmd_eval(eval_model, d);
        }
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, sweep_threads);
        if (gradcheck->parsed()) return cmd_gradcheck(gc_config, gc_seeds);
        if (resize->parsed()) return cmd_resize(rz_in, rz_out, rz_header, rz_rows, rz_cols);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ParamError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ShapeError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
