#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "deepnet/activations.hpp"
#include "deepnet/matrix.hpp"
#include "deepnet/rng.hpp"

namespace deepnet {

/// One layer mapping s_in units to s_out units: weights are s_out x s_in,
/// bias is a 1 x s_out row. A batch propagates as sigma(X W^T + bias).
struct LayerParams {
    Matrix weights;
    Matrix bias;
};

struct NetworkParams {
    std::vector<LayerParams> layers;
    ActivationKind hidden_activation = ActivationKind::sigmoid;
    ActivationKind output_activation = ActivationKind::sigmoid;

    std::size_t input_size() const { return layers.front().weights.cols(); }
    std::size_t output_size() const { return layers.back().weights.rows(); }
    std::vector<std::size_t> layer_sizes() const;
};

/// Same shapes as the network's layers; used for gradients and velocities.
using Gradients = std::vector<LayerParams>;

struct RegularizerSpec {
    double l2_lambda = 0.0;
    double l1_lambda = 0.0;
};

/// Inverted dropout: kept units are scaled by 1/retain at training time,
/// so prediction-time forward passes need no rescaling.
struct DropoutSpec {
    double retain_input = 1.0;
    double retain_hidden = 1.0;
};

struct InitScheme {
    enum class Kind { gaussian, sparse };
    Kind kind = Kind::gaussian;
    double sigma = 0.01;
    std::size_t k_nonzero = 0;  // sparse: gaussian entries kept per unit's fan-in

    static InitScheme gaussian(double sigma) { return {Kind::gaussian, sigma, 0}; }
    static InitScheme sparse(std::size_t k, double sigma = 0.01) {
        return {Kind::sparse, sigma, k};
    }
};

NetworkParams init_network(const std::vector<std::size_t>& sizes, const InitScheme& scheme,
                           Rng& rng);

/// Activations of every layer, input included (result.front() == X after
/// input dropout, result.back() == prediction). Dropout masks are drawn
/// fresh from rng on every call.
std::vector<Matrix> forward(const NetworkParams& net, const Matrix& X);
std::vector<Matrix> forward(const NetworkParams& net, const Matrix& X,
                            const std::optional<DropoutSpec>& dropout, Rng& rng);

/// Data term averaged over examples plus the regularization penalties
/// (l2 * sum w^2 + l1 * sum |w|, biases excluded). cross_entropy is the
/// categorical form -sum y log p for softmax outputs and the elementwise
/// binary form otherwise; predictions are clamped to [1e-12, 1-1e-12].
double loss(LossKind kind, const Matrix& pred, const Matrix& target,
            const RegularizerSpec& reg, const NetworkParams& net);

/// Per-example error at the output layer before batch averaging. For the
/// fused softmax/cross-entropy and sigmoid/cross-entropy pairs this is
/// exactly pred - target.
Matrix output_delta(LossKind kind, ActivationKind output_activation, const Matrix& pred,
                    const Matrix& target);

struct BackpropConfig {
    LossKind loss = LossKind::cross_entropy;
    RegularizerSpec reg{};
    std::optional<DropoutSpec> dropout{};
    // Optional row (1 x s_j) added to hidden layer j's backpropagated
    // error before the activation derivative; used by sparsity penalties.
    // Empty matrices mean no injection for that hidden layer.
    std::vector<Matrix> hidden_delta_add{};
};

/// Mean gradient of the loss over the batch, including regularization
/// (d/dw of l2 w^2 is 2*l2*w; l1 contributes l1*sign(w) with sign(0)=0).
/// Dropout masks are shared between the internal forward pass and the
/// backward pass.
Gradients backprop(const NetworkParams& net, const Matrix& X, const Matrix& Y,
                   LossKind loss_kind, const RegularizerSpec& reg,
                   const std::optional<DropoutSpec>& dropout, Rng& rng);
/// data_loss_out, when given, receives the batch's data term (no
/// regularization) from the same forward pass the gradient used.
Gradients backprop_ex(const NetworkParams& net, const Matrix& X, const Matrix& Y,
                      const BackpropConfig& cfg, Rng& rng,
                      double* data_loss_out = nullptr);

// Flat views over every parameter matrix (weights then bias per layer);
// the optimizer and the finite-difference checks work on these.
std::vector<Matrix*> parameter_views(NetworkParams& net);
std::vector<Matrix> flatten(const Gradients& grads);
Gradients gradients_like(const NetworkParams& net);

}  // namespace deepnet
