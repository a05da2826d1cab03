#include "deepnet/autoencoder.hpp"

#include <algorithm>
#include <cmath>

#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

double clamp_q(double q) { return std::clamp(q, 1e-12, 1.0 - 1e-12); }

Matrix sparsity_injection(const SparsityConfig& sp, const Matrix& mean_activation) {
    Matrix row(1, mean_activation.cols());
    for (std::size_t j = 0; j < row.cols(); ++j) {
        const double q = clamp_q(mean_activation(0, j));
        row(0, j) = sp.weight * (-sp.target / q + (1.0 - sp.target) / (1.0 - q));
    }
    return row;
}

void check_unit_range(const Matrix& X, const char* who) {
    for (double v : X.data()) {
        if (!(v >= 0.0 && v <= 1.0))
            throw ParamError(std::string(who) + ": data entries must lie in [0, 1]");
    }
}

}  // namespace

double kl_divergence(double p, double q) {
    q = clamp_q(q);
    double kl = 0.0;
    if (p > 0.0) kl += p * std::log(p / q);
    if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    return kl;
}

Matrix corrupt(const Matrix& X, const CorruptionSpec& spec, Rng& rng) {
    switch (spec.kind) {
        case CorruptionKind::none:
            return X;
        case CorruptionKind::masking: {
            Matrix out = X;
            for (double& v : out.data())
                if (rng.bernoulli(spec.level)) v = 0.0;
            return out;
        }
        case CorruptionKind::salt_pepper: {
            Matrix out = X;
            for (double& v : out.data())
                if (rng.bernoulli(spec.level)) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
            return out;
        }
    }
    throw ParamError("unknown corruption kind");
}

Matrix mean_hidden_activation(const AutoencoderParams& ae, const Matrix& X) {
    if (X.rows() == 0) throw ShapeError("mean_hidden_activation: empty dataset");
    Matrix hidden = activate(
        ActivationKind::sigmoid,
        add_row_broadcast(matmul(X, transpose(ae.encoder.weights)), ae.encoder.bias));
    return col_means(hidden);
}

NetworkParams to_network(const AutoencoderParams& ae) {
    NetworkParams net;
    net.hidden_activation = ActivationKind::sigmoid;
    net.output_activation = ActivationKind::sigmoid;
    net.layers = {ae.encoder, ae.decoder};
    return net;
}

AutoencoderParams from_network(const NetworkParams& net) {
    if (net.layers.size() != 2)
        throw ShapeError("from_network: autoencoders have exactly two layers");
    return {net.layers[0], net.layers[1]};
}

double sparse_ae_loss(const NetworkParams& net, const Matrix& X_in, const Matrix& X_target,
                      const std::optional<SparsityConfig>& sparsity) {
    auto acts = forward(net, X_in);
    double j = loss(LossKind::cross_entropy, acts.back(), X_target, RegularizerSpec{}, net);
    if (sparsity && sparsity->weight != 0.0) {
        const Matrix& hidden = acts[1];
        Matrix p_hat = col_means(hidden);
        for (std::size_t k = 0; k < p_hat.cols(); ++k)
            j += sparsity->weight * kl_divergence(sparsity->target, p_hat(0, k));
    }
    return j;
}

Gradients sparse_ae_gradient(const NetworkParams& net, const Matrix& X_in,
                             const Matrix& X_target,
                             const std::optional<SparsityConfig>& sparsity,
                             const Matrix& mean_activation) {
    BackpropConfig cfg;
    cfg.loss = LossKind::cross_entropy;
    if (sparsity && sparsity->weight != 0.0)
        cfg.hidden_delta_add = {sparsity_injection(*sparsity, mean_activation)};
    Rng unused(0);  // no dropout, no draws
    return backprop_ex(net, X_in, X_target, cfg, unused);
}

namespace {

class AeTrainable final : public Trainable {
public:
    AeTrainable(NetworkParams& net, const AeTrainConfig& cfg, Rng& rng)
        : net_(net), cfg_(cfg), rng_(rng) {
        if (cfg_.sparsity) {
            p_hat_ = Matrix(1, net_.layers[0].weights.rows());
            for (double& v : p_hat_.data()) v = cfg_.sparsity->target;
        }
    }

    std::vector<Matrix*> parameters() override { return parameter_views(net_); }

    std::vector<Matrix> gradient(const Matrix& X, const Matrix& Y,
                                 double& batch_loss) override {
        Matrix noisy = corrupt(X, cfg_.corruption, rng_);
        BackpropConfig bp;
        bp.loss = LossKind::cross_entropy;
        if (cfg_.sparsity && cfg_.sparsity->weight != 0.0)
            bp.hidden_delta_add = {sparsity_injection(*cfg_.sparsity, p_hat_)};
        Gradients grads = backprop_ex(net_, noisy, Y, bp, rng_, &batch_loss);
        if (cfg_.sparsity && cfg_.sparsity->batch_running_estimate) {
            Matrix batch_mean =
                mean_hidden_activation(from_network(net_), noisy);
            const double d = cfg_.sparsity->running_decay;
            for (std::size_t j = 0; j < p_hat_.cols(); ++j)
                p_hat_(0, j) = d * p_hat_(0, j) + (1.0 - d) * batch_mean(0, j);
        }
        return flatten(grads);
    }

    void refresh_mean_activation(const Matrix& X) {
        if (cfg_.sparsity && !cfg_.sparsity->batch_running_estimate)
            p_hat_ = mean_hidden_activation(from_network(net_), X);
    }

private:
    NetworkParams& net_;
    const AeTrainConfig& cfg_;
    Rng& rng_;
    Matrix p_hat_;
};

}  // namespace

AeTrainResult train_autoencoder(const Matrix& X, std::size_t hidden_size,
                                const AeTrainConfig& cfg, Rng& rng) {
    if (hidden_size < 1) throw ParamError("train_autoencoder: hidden size must be >= 1");
    if (X.rows() == 0) throw ParamError("train_autoencoder: empty training data");
    check_unit_range(X, "train_autoencoder");

    NetworkParams net = init_network({X.cols(), hidden_size, X.cols()},
                                     InitScheme::gaussian(cfg.init_sigma), rng);
    AeTrainable trainable(net, cfg, rng);
    trainable.refresh_mean_activation(X);

    TrainMonitors monitors;
    monitors.on_epoch = [&](const EpochRecord&) { trainable.refresh_mean_activation(X); };
    TrainingHistory history = run_epochs(trainable, X, X, cfg.opt, monitors);

    AeTrainResult result;
    result.params = from_network(net);
    result.recon_loss.reserve(history.size());
    for (const EpochRecord& r : history) result.recon_loss.push_back(r.train_loss);
    return result;
}

}  // namespace deepnet
