#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace deepnet {

struct DataConfig {
    std::string format = "idx";  // idx | csv
    std::string train_images, train_labels, test_images, test_labels;
    std::string train_csv, test_csv;
    bool has_header = false;
    std::size_t n_classes = 10;
    bool resize = false;  // halve image dimensions bilinearly
    std::size_t image_rows = 0, image_cols = 0;  // required for csv resize
    std::size_t n_train = 0, n_test = 0;  // 0 keeps every row; csv without
                                          // test_csv splits train_csv
};

/// One experiment, fully specified. Mirrors the JSON config schema;
/// unknown keys are rejected and every invalid field is reported.
struct ExperimentConfig {
    std::string model = "mlp";  // dbn | sae | sdae | mlp | disc_pretrain
    std::vector<std::size_t> hidden_sizes{100, 100};
    std::string hidden_activation = "sigmoid";
    std::string output_activation = "softmax";
    std::string loss = "cross_entropy";
    std::string algorithm = "minibatch";  // batch | stochastic | minibatch

    double learning_rate = 1.0;
    double finetune_learning_rate = -1.0;  // < 0 means: use learning_rate
    double momentum = 0.0;
    double l2_lambda = 0.0;
    double l1_lambda = 0.0;
    std::size_t batch_size = 100;
    std::size_t epochs_pretrain = 10;
    std::size_t epochs_finetune = 10;

    double dropout_retain_input = 1.0;
    double dropout_retain_hidden = 1.0;

    double sparsity_target = 0.05;
    double sparsity_weight = 0.0;

    std::string corruption = "none";  // none | masking | salt_pepper
    double corruption_level = 0.0;

    long patience = -1;  // < 0 disables early stopping
    double min_delta = 0.0;
    double validation_fraction = 0.0;

    std::size_t cd_k = 1;
    double init_sigma = 0.1;  // feed-forward / autoencoder weight init
    bool finetune = true;
    std::uint64_t seed = 42;

    DataConfig data{};

    double effective_finetune_rate() const {
        return finetune_learning_rate < 0.0 ? learning_rate : finetune_learning_rate;
    }
};

/// Parse and validate; throws ConfigError listing every offending field.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace deepnet
