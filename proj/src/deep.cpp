#include "deepnet/deep.hpp"

#include <chrono>

#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Trainable wrapper over a feed-forward classifier.
class NetTrainable final : public Trainable {
public:
    NetTrainable(NetworkParams& net, const FinetuneConfig& cfg, Rng& rng)
        : net_(net), cfg_(cfg), rng_(rng) {}

    std::vector<Matrix*> parameters() override { return parameter_views(net_); }

    std::vector<Matrix> gradient(const Matrix& X, const Matrix& Y,
                                 double& batch_loss) override {
        BackpropConfig bp;
        bp.loss = cfg_.loss;
        bp.reg = cfg_.reg;
        bp.dropout = cfg_.dropout;
        return flatten(backprop_ex(net_, X, Y, bp, rng_, &batch_loss));
    }

private:
    NetworkParams& net_;
    const FinetuneConfig& cfg_;
    Rng& rng_;
};

}  // namespace

std::pair<std::vector<LayerParams>, PretrainReport> pretrain_stack(const Matrix& X,
                                                                   const StackSpec& spec,
                                                                   Rng& rng) {
    if (spec.hidden_sizes.empty())
        throw ParamError("pretrain_stack: hidden_sizes must be nonempty");

    std::vector<LayerParams> layers;
    PretrainReport report;
    Matrix input = X;
    for (std::size_t hidden : spec.hidden_sizes) {
        const auto started = std::chrono::steady_clock::now();
        PretrainReport::LayerReport lr;
        LayerParams layer;
        if (spec.unit_kind == UnitKind::rbm) {
            RbmParams rbm = init_rbm(input.cols(), hidden, input, rng);
            lr.recon_error = train_rbm(rbm, input, spec.cd, rng);
            layer = {transpose(rbm.W), rbm.b};
        } else {
            AeTrainResult trained = train_autoencoder(input, hidden, spec.ae, rng);
            lr.recon_error = trained.recon_loss;
            layer = trained.params.encoder;
        }
        // next module trains on this one's hidden activations
        input = activate(ActivationKind::sigmoid,
                         add_row_broadcast(matmul(input, transpose(layer.weights)),
                                           layer.bias));
        lr.seconds = elapsed_seconds(started);
        report.layers.push_back(std::move(lr));
        layers.push_back(std::move(layer));
    }
    return {std::move(layers), std::move(report)};
}

NetworkParams unroll_to_classifier(const std::vector<LayerParams>& layers,
                                   std::size_t input_size, std::size_t n_classes,
                                   ActivationKind output_activation, Rng& rng) {
    if (n_classes < 2) throw ParamError("unroll_to_classifier: need at least two classes");
    if (!layers.empty() && layers.front().weights.cols() != input_size) {
        throw ShapeError("unroll_to_classifier: first layer expects " +
                         std::to_string(layers.front().weights.cols()) +
                         " inputs, dataset has " + std::to_string(input_size));
    }
    NetworkParams net;
    net.hidden_activation = ActivationKind::sigmoid;
    net.output_activation = output_activation;
    net.layers = layers;

    const std::size_t top = layers.empty() ? input_size : layers.back().weights.rows();
    LayerParams out{Matrix(n_classes, top), Matrix(1, n_classes)};
    for (double& w : out.weights.data()) w = 0.01 * rng.normal();
    net.layers.push_back(std::move(out));
    return net;
}

FinetuneResult finetune(NetworkParams net, const Dataset& train, const Dataset* val,
                        const FinetuneConfig& cfg, Rng& rng) {
    FinetuneResult result{std::move(net), {}};
    if (cfg.opt.epochs == 0) return result;

    NetTrainable trainable(result.net, cfg, rng);
    TrainMonitors monitors;
    if (val) monitors.validation_error = [&]() { return evaluate(result.net, *val); };
    if (cfg.early_stopping) {
        if (!val) throw ParamError("finetune: early stopping requires a validation set");
        monitors.early_stopping = cfg.early_stopping;
    }
    result.history = run_epochs(trainable, train.X, train.Y, cfg.opt, monitors);
    return result;
}

NetworkParams discriminative_pretrain(const std::vector<std::size_t>& sizes,
                                      const Dataset& train, const Dataset* val,
                                      const OptimizerConfig& stage_cfg,
                                      const FinetuneConfig& final_cfg, Rng& rng) {
    if (sizes.size() < 3)
        throw ParamError("discriminative_pretrain: need input, >=1 hidden, output sizes");
    const std::size_t n_hidden_layers = sizes.size() - 2;
    const std::size_t n_classes = sizes.back();

    // stage 1: input -> first hidden -> output
    NetworkParams net =
        init_network({sizes[0], sizes[1], n_classes}, InitScheme::gaussian(0.01), rng);
    net.output_activation = final_cfg.loss == LossKind::cross_entropy
                                ? ActivationKind::softmax
                                : ActivationKind::sigmoid;

    for (std::size_t stage = 1; stage <= n_hidden_layers; ++stage) {
        const bool last = stage == n_hidden_layers;
        if (stage > 1) {
            // insert a fresh hidden layer before the output; existing
            // hidden layers warm-start the retraining
            const std::size_t prev = sizes[stage - 1];
            const std::size_t next = sizes[stage];
            NetworkParams insert =
                init_network({prev, next, n_classes}, InitScheme::gaussian(0.01), rng);
            net.layers.pop_back();  // old output layer
            net.layers.push_back(std::move(insert.layers[0]));
            net.layers.push_back(std::move(insert.layers[1]));
        }
        FinetuneConfig cfg = final_cfg;
        if (!last) {
            cfg.opt = stage_cfg;
            cfg.early_stopping.reset();
        }
        FinetuneResult r = finetune(std::move(net), train, val, cfg, rng);
        net = std::move(r.net);
    }
    return net;
}

std::vector<int> predict(const NetworkParams& net, const Matrix& X) {
    Matrix out = forward(net, X).back();
    std::vector<int> classes(out.rows());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < out.cols(); ++j)
            if (out(i, j) > out(i, best)) best = j;
        classes[i] = int(best);
    }
    return classes;
}

double evaluate(const NetworkParams& net, const Dataset& ds) {
    if (ds.size() == 0) throw ParamError("evaluate: empty dataset");
    std::vector<int> pred = predict(net, ds.X);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] != ds.y[i]) ++wrong;
    return double(wrong) / double(pred.size());
}

}  // namespace deepnet
