#pragma once

#include <optional>
#include <vector>

#include "deepnet/autoencoder.hpp"
#include "deepnet/data.hpp"
#include "deepnet/network.hpp"
#include "deepnet/optim.hpp"
#include "deepnet/rbm.hpp"

namespace deepnet {

enum class UnitKind { rbm, autoencoder };

/// Layer-wise pre-training plan: one entry of hidden_sizes per stacked
/// module, all trained with the same unit settings.
struct StackSpec {
    std::vector<std::size_t> hidden_sizes;
    UnitKind unit_kind = UnitKind::rbm;
    CdConfig cd{};        // rbm stacks
    AeTrainConfig ae{};   // autoencoder stacks (only encoders are kept)
};

struct PretrainReport {
    struct LayerReport {
        std::vector<double> recon_error;  // per epoch
        double seconds = 0.0;
    };
    std::vector<LayerReport> layers;
};

/// Greedy layer-wise pre-training: the first module trains on X, every
/// later one on its predecessor's hidden activations (probabilities, not
/// samples). Returns the feed-forward hidden maps in stacking order.
std::pair<std::vector<LayerParams>, PretrainReport> pretrain_stack(const Matrix& X,
                                                                   const StackSpec& spec,
                                                                   Rng& rng);

/// Append a fresh output layer (weights ~ N(0, 0.01^2), zero bias) to the
/// pre-trained hidden layers. Pre-trained weights are copied untouched.
/// An empty stack yields plain softmax (or sigmoid) regression on
/// input_size features.
NetworkParams unroll_to_classifier(const std::vector<LayerParams>& layers,
                                   std::size_t input_size, std::size_t n_classes,
                                   ActivationKind output_activation, Rng& rng);

struct FinetuneConfig {
    OptimizerConfig opt{};
    LossKind loss = LossKind::cross_entropy;
    RegularizerSpec reg{};
    std::optional<DropoutSpec> dropout{};
    std::optional<EarlyStoppingConfig> early_stopping{};
};

struct FinetuneResult {
    NetworkParams net;
    TrainingHistory history;
};

/// Supervised backpropagation over the whole unrolled network. With
/// early stopping active the best-validation snapshot is returned.
FinetuneResult finetune(NetworkParams net, const Dataset& train, const Dataset* val,
                        const FinetuneConfig& cfg, Rng& rng);

/// Train a single-hidden-layer network, then repeatedly insert the next
/// hidden layer (freshly initialized, with a fresh output layer) before
/// the output and retrain the whole net. Earlier stages run stage_cfg;
/// the last stage is the full fine-tuning pass under final_cfg.
NetworkParams discriminative_pretrain(const std::vector<std::size_t>& sizes,
                                      const Dataset& train, const Dataset* val,
                                      const OptimizerConfig& stage_cfg,
                                      const FinetuneConfig& final_cfg, Rng& rng);

/// Predicted class per row: argmax of the output activations, lowest
/// index on ties.
std::vector<int> predict(const NetworkParams& net, const Matrix& X);

/// Misclassified fraction in [0, 1].
double evaluate(const NetworkParams& net, const Dataset& ds);

}  // namespace deepnet
