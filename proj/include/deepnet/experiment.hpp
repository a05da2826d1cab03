#pragma once

#include <string>

#include "deepnet/config.hpp"
#include "deepnet/deep.hpp"

namespace deepnet {

struct ExperimentResult {
    NetworkParams net;
    double test_error = 1.0;
    double train_error = 1.0;
    double pre_finetune_test_error = 1.0;  // classifier error before fine-tuning
    TrainingHistory finetune_history;
    PretrainReport pretrain_report;
};

/// Train and test datasets resolved from a config's data section.
struct DatasetBundle {
    Dataset train;
    Dataset test;
};

DatasetBundle load_data(const DataConfig& cfg);

/// Pre-train (model permitting), unroll, fine-tune and evaluate one
/// configured experiment on the given data.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                const Dataset& test);

/// Backpropagation vs. symmetric finite differences on a tiny randomly
/// initialized model using the config's loss/regularization/sparsity
/// settings (dropout off). Returns the worst relative error.
double run_gradcheck(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace deepnet
