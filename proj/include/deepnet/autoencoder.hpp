#pragma once

#include <optional>
#include <vector>

#include "deepnet/network.hpp"
#include "deepnet/optim.hpp"

namespace deepnet {

/// Three-layer autoencoder (s1 -> s2 -> s1), sigmoid units throughout,
/// untied encoder/decoder weights.
struct AutoencoderParams {
    LayerParams encoder;
    LayerParams decoder;

    std::size_t input_size() const { return encoder.weights.cols(); }
    std::size_t hidden_size() const { return encoder.weights.rows(); }
};

struct SparsityConfig {
    double target = 0.05;  // desired mean hidden activation p
    double weight = 0.0;   // penalty strength
    // Recompute the mean activation over the full training set once per
    // epoch (default) or keep a per-batch running estimate instead.
    bool batch_running_estimate = false;
    double running_decay = 0.9;
};

enum class CorruptionKind { none, masking, salt_pepper };

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::none;
    double level = 0.0;  // probability q of corrupting each entry
};

/// Bernoulli KL divergence p log(p/q) + (1-p) log((1-p)/(1-q)); q is
/// clamped to [1e-12, 1-1e-12]. Zero iff p == q, positive otherwise.
double kl_divergence(double p, double q);

/// masking zeroes each entry with probability q; salt_pepper sets each
/// entry with probability q to 0 or 1 on a fair coin; none is identity.
Matrix corrupt(const Matrix& X, const CorruptionSpec& spec, Rng& rng);

/// Column means of the hidden activations over the whole dataset.
Matrix mean_hidden_activation(const AutoencoderParams& ae, const Matrix& X);

// An autoencoder is exactly a two-layer sigmoid network; these convert
// between the two representations.
NetworkParams to_network(const AutoencoderParams& ae);
AutoencoderParams from_network(const NetworkParams& net);

/// Reconstruction cross-entropy plus the KL sparsity penalty, with the
/// mean activation recomputed from X. The oracle for gradient checks.
double sparse_ae_loss(const NetworkParams& net, const Matrix& X_in, const Matrix& X_target,
                      const std::optional<SparsityConfig>& sparsity);

/// Batch gradient with the sparsity term injected into the hidden delta;
/// mean_activation is the 1 x s2 estimate the penalty differentiates at.
Gradients sparse_ae_gradient(const NetworkParams& net, const Matrix& X_in,
                             const Matrix& X_target,
                             const std::optional<SparsityConfig>& sparsity,
                             const Matrix& mean_activation);

struct AeTrainConfig {
    OptimizerConfig opt{};
    std::optional<SparsityConfig> sparsity{};
    CorruptionSpec corruption{};
    double init_sigma = 0.1;
};

struct AeTrainResult {
    AutoencoderParams params;
    std::vector<double> recon_loss;  // per epoch
};

/// Train on corrupted inputs against clean targets. The sparsity mean
/// activation is refreshed by a full forward pass once per epoch unless
/// the running-estimate mode is selected.
AeTrainResult train_autoencoder(const Matrix& X, std::size_t hidden_size,
                                const AeTrainConfig& cfg, Rng& rng);

}  // namespace deepnet
