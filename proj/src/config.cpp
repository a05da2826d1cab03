#include "deepnet/config.hpp"

#include <fstream>
#include <set>

#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

using nlohmann::json;

class Reader {
public:
    Reader(const json& doc, std::string scope, std::vector<std::string>& errors)
        : doc_(doc), scope_(std::move(scope)), errors_(errors) {}

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = doc_.find(key);
        if (it == doc_.end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            fail(key, "has the wrong type");
        }
    }

    void fail(const std::string& key, const std::string& why) {
        errors_.push_back(scope_ + key + " " + why);
    }

    void mark_seen(const char* key) { seen_.insert(key); }

    void reject_unknown() {
        for (auto it = doc_.begin(); it != doc_.end(); ++it) {
            if (!seen_.contains(it.key())) fail(it.key(), "is not a recognized field");
        }
    }

private:
    const json& doc_;
    std::string scope_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

const std::set<std::string> kModels = {"dbn", "sae", "sdae", "mlp", "disc_pretrain"};
const std::set<std::string> kHiddenActs = {"sigmoid", "relu", "softplus", "linear"};
const std::set<std::string> kOutputActs = {"sigmoid", "softmax", "linear"};
const std::set<std::string> kLosses = {"squared_error", "cross_entropy"};
const std::set<std::string> kAlgorithms = {"batch", "stochastic", "minibatch"};
const std::set<std::string> kCorruptions = {"none", "masking", "salt_pepper"};
const std::set<std::string> kFormats = {"idx", "csv"};

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    std::vector<std::string> errors;
    ExperimentConfig cfg;

    Reader r(doc, "", errors);
    r.get("model", cfg.model);
    r.get("hidden_sizes", cfg.hidden_sizes);
    r.get("hidden_activation", cfg.hidden_activation);
    r.get("output_activation", cfg.output_activation);
    r.get("loss", cfg.loss);
    r.get("algorithm", cfg.algorithm);
    r.get("learning_rate", cfg.learning_rate);
    r.get("finetune_learning_rate", cfg.finetune_learning_rate);
    r.get("momentum", cfg.momentum);
    r.get("l2_lambda", cfg.l2_lambda);
    r.get("l1_lambda", cfg.l1_lambda);
    r.get("batch_size", cfg.batch_size);
    r.get("epochs_pretrain", cfg.epochs_pretrain);
    r.get("epochs_finetune", cfg.epochs_finetune);
    r.get("dropout_retain_input", cfg.dropout_retain_input);
    r.get("dropout_retain_hidden", cfg.dropout_retain_hidden);
    r.get("sparsity_target", cfg.sparsity_target);
    r.get("sparsity_weight", cfg.sparsity_weight);
    r.get("corruption", cfg.corruption);
    r.get("corruption_level", cfg.corruption_level);
    r.get("patience", cfg.patience);
    r.get("min_delta", cfg.min_delta);
    r.get("validation_fraction", cfg.validation_fraction);
    r.get("cd_k", cfg.cd_k);
    r.get("init_sigma", cfg.init_sigma);
    r.get("finetune", cfg.finetune);
    r.get("seed", cfg.seed);

    if (doc.contains("data")) {
        r.mark_seen("data");
        const json& d = doc["data"];
        if (!d.is_object()) {
            r.fail("data", "must be an object");
        } else {
            Reader rd(d, "data.", errors);
            rd.get("format", cfg.data.format);
            rd.get("train_images", cfg.data.train_images);
            rd.get("train_labels", cfg.data.train_labels);
            rd.get("test_images", cfg.data.test_images);
            rd.get("test_labels", cfg.data.test_labels);
            rd.get("train_csv", cfg.data.train_csv);
            rd.get("test_csv", cfg.data.test_csv);
            rd.get("has_header", cfg.data.has_header);
            rd.get("n_classes", cfg.data.n_classes);
            rd.get("resize", cfg.data.resize);
            rd.get("image_rows", cfg.data.image_rows);
            rd.get("image_cols", cfg.data.image_cols);
            rd.get("n_train", cfg.data.n_train);
            rd.get("n_test", cfg.data.n_test);
            rd.reject_unknown();
        }
    }
    r.reject_unknown();

    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    check(kModels.contains(cfg.model), "model '" + cfg.model + "' is not one of dbn/sae/sdae/mlp/disc_pretrain");
    for (std::size_t s : cfg.hidden_sizes)
        check(s > 0, "hidden_sizes entries must be positive");
    check(!cfg.hidden_sizes.empty() || cfg.model == "mlp",
          "hidden_sizes must be nonempty for model '" + cfg.model + "'");
    check(kHiddenActs.contains(cfg.hidden_activation),
          "hidden_activation '" + cfg.hidden_activation + "' is invalid (softmax is output-only)");
    check(kOutputActs.contains(cfg.output_activation),
          "output_activation '" + cfg.output_activation + "' is invalid");
    check(kLosses.contains(cfg.loss), "loss '" + cfg.loss + "' is invalid");
    check(kAlgorithms.contains(cfg.algorithm), "algorithm '" + cfg.algorithm + "' is invalid");
    if (cfg.output_activation == "softmax")
        check(cfg.loss == "cross_entropy", "softmax output requires loss cross_entropy");
    check(cfg.learning_rate > 0.0, "learning_rate must be > 0");
    check(cfg.momentum >= 0.0 && cfg.momentum < 1.0, "momentum must lie in [0, 1)");
    check(cfg.l2_lambda >= 0.0, "l2_lambda must be >= 0");
    check(cfg.l1_lambda >= 0.0, "l1_lambda must be >= 0");
    check(cfg.batch_size >= 1, "batch_size must be >= 1");
    check(cfg.dropout_retain_input > 0.0 && cfg.dropout_retain_input <= 1.0,
          "dropout_retain_input must lie in (0, 1]");
    check(cfg.dropout_retain_hidden > 0.0 && cfg.dropout_retain_hidden <= 1.0,
          "dropout_retain_hidden must lie in (0, 1]");
    check(cfg.sparsity_target > 0.0 && cfg.sparsity_target < 1.0,
          "sparsity_target must lie in (0, 1)");
    check(cfg.sparsity_weight >= 0.0, "sparsity_weight must be >= 0");
    check(kCorruptions.contains(cfg.corruption),
          "corruption '" + cfg.corruption + "' is invalid");
    check(cfg.corruption_level >= 0.0 && cfg.corruption_level <= 1.0,
          "corruption_level must lie in [0, 1]");
    if (cfg.model == "sdae")
        check(cfg.corruption != "none" && cfg.corruption_level > 0.0,
              "model sdae needs corruption masking or salt_pepper with corruption_level > 0");
    check(cfg.min_delta >= 0.0, "min_delta must be >= 0");
    check(cfg.validation_fraction >= 0.0 && cfg.validation_fraction <= 0.5,
          "validation_fraction must lie in [0, 0.5]");
    if (cfg.patience >= 0)
        check(cfg.validation_fraction > 0.0,
              "early stopping (patience >= 0) needs validation_fraction > 0");
    check(cfg.cd_k >= 1, "cd_k must be >= 1");
    check(cfg.init_sigma >= 0.0, "init_sigma must be >= 0");
    check(kFormats.contains(cfg.data.format), "data.format must be idx or csv");

    // path requirements bind only when a data section is given; callers
    // feeding in-memory datasets omit it
    if (doc.contains("data") && doc["data"].is_object()) {
        if (cfg.data.format == "idx") {
            check(!cfg.data.train_images.empty(), "data.train_images is required for idx");
            check(!cfg.data.train_labels.empty(), "data.train_labels is required for idx");
            check(!cfg.data.test_images.empty(), "data.test_images is required for idx");
            check(!cfg.data.test_labels.empty(), "data.test_labels is required for idx");
        } else if (cfg.data.format == "csv") {
            check(!cfg.data.train_csv.empty(), "data.train_csv is required for csv");
            if (cfg.data.test_csv.empty())
                check(cfg.data.n_train > 0 && cfg.data.n_test > 0,
                      "csv without test_csv needs n_train and n_test for the split");
            if (cfg.data.resize)
                check(cfg.data.image_rows > 0 && cfg.data.image_cols > 0,
                      "csv resize needs image_rows and image_cols");
        }
    }
    check(cfg.data.n_classes >= 2, "data.n_classes must be >= 2");

    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const std::string& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': invalid JSON: " + e.what());
    }
    return parse_experiment_config(doc);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    json d;
    d["model"] = cfg.model;
    d["hidden_sizes"] = cfg.hidden_sizes;
    d["hidden_activation"] = cfg.hidden_activation;
    d["output_activation"] = cfg.output_activation;
    d["loss"] = cfg.loss;
    d["algorithm"] = cfg.algorithm;
    d["learning_rate"] = cfg.learning_rate;
    d["finetune_learning_rate"] = cfg.finetune_learning_rate;
    d["momentum"] = cfg.momentum;
    d["l2_lambda"] = cfg.l2_lambda;
    d["l1_lambda"] = cfg.l1_lambda;
    d["batch_size"] = cfg.batch_size;
    d["epochs_pretrain"] = cfg.epochs_pretrain;
    d["epochs_finetune"] = cfg.epochs_finetune;
    d["dropout_retain_input"] = cfg.dropout_retain_input;
    d["dropout_retain_hidden"] = cfg.dropout_retain_hidden;
    d["sparsity_target"] = cfg.sparsity_target;
    d["sparsity_weight"] = cfg.sparsity_weight;
    d["corruption"] = cfg.corruption;
    d["corruption_level"] = cfg.corruption_level;
    d["patience"] = cfg.patience;
    d["min_delta"] = cfg.min_delta;
    d["validation_fraction"] = cfg.validation_fraction;
    d["cd_k"] = cfg.cd_k;
    d["init_sigma"] = cfg.init_sigma;
    d["finetune"] = cfg.finetune;
    d["seed"] = cfg.seed;
    json data;
    data["format"] = cfg.data.format;
    data["train_images"] = cfg.data.train_images;
    data["train_labels"] = cfg.data.train_labels;
    data["test_images"] = cfg.data.test_images;
    data["test_labels"] = cfg.data.test_labels;
    data["train_csv"] = cfg.data.train_csv;
    data["test_csv"] = cfg.data.test_csv;
    data["has_header"] = cfg.data.has_header;
    data["n_classes"] = cfg.data.n_classes;
    data["resize"] = cfg.data.resize;
    data["image_rows"] = cfg.data.image_rows;
    data["image_cols"] = cfg.data.image_cols;
    data["n_train"] = cfg.data.n_train;
    data["n_test"] = cfg.data.n_test;
    d["data"] = std::move(data);
    return d;
}

}  // namespace deepnet
