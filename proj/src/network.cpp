#include "deepnet/network.hpp"

#include <algorithm>
#include <cmath>

#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

constexpr double kProbClamp = 1e-12;

double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

void check_input_width(const NetworkParams& net, const Matrix& X) {
    if (X.cols() != net.input_size()) {
        throw ShapeError("forward: input has " + std::to_string(X.cols()) +
                         " columns, network expects " + std::to_string(net.input_size()));
    }
}

// Dropout mask with inverted scaling baked in: entries are 1/retain for
// kept units and 0 for dropped ones, so applying the mask is a hadamard.
Matrix draw_mask(std::size_t rows, std::size_t cols, double retain, Rng& rng) {
    Matrix mask(rows, cols);
    const double inv = 1.0 / retain;
    for (double& v : mask.data()) v = rng.bernoulli(retain) ? inv : 0.0;
    return mask;
}

struct ForwardPass {
    std::vector<Matrix> raw;     // activation outputs before dropout
    std::vector<Matrix> masked;  // what actually feeds the next layer
    std::vector<Matrix> masks;   // empty Matrix where no dropout applied
};

ForwardPass forward_masked(const NetworkParams& net, const Matrix& X,
                           const std::optional<DropoutSpec>& dropout, Rng* rng) {
    check_input_width(net, X);
    const std::size_t L = net.layers.size();
    ForwardPass fp;
    fp.raw.reserve(L + 1);
    fp.masked.reserve(L + 1);
    fp.masks.assign(L + 1, Matrix{});

    fp.raw.push_back(X);
    if (dropout && dropout->retain_input < 1.0) {
        fp.masks[0] = draw_mask(X.rows(), X.cols(), dropout->retain_input, *rng);
        fp.masked.push_back(hadamard(X, fp.masks[0]));
    } else {
        fp.masked.push_back(X);
    }

    for (std::size_t l = 0; l < L; ++l) {
        const LayerParams& layer = net.layers[l];
        Matrix z = add_row_broadcast(matmul(fp.masked.back(), transpose(layer.weights)),
                                     layer.bias);
        const bool is_output = (l + 1 == L);
        Matrix a = activate(is_output ? net.output_activation : net.hidden_activation, z);
        fp.raw.push_back(a);
        if (!is_output && dropout && dropout->retain_hidden < 1.0) {
            fp.masks[l + 1] =
                draw_mask(a.rows(), a.cols(), dropout->retain_hidden, *rng);
            fp.masked.push_back(hadamard(fp.raw.back(), fp.masks[l + 1]));
        } else {
            fp.masked.push_back(fp.raw.back());
        }
    }
    return fp;
}

double regularization_penalty(const RegularizerSpec& reg, const NetworkParams& net) {
    if (reg.l2_lambda == 0.0 && reg.l1_lambda == 0.0) return 0.0;
    double l2 = 0.0, l1 = 0.0;
    for (const LayerParams& layer : net.layers) {
        for (double w : layer.weights.data()) {
            l2 += w * w;
            l1 += std::abs(w);
        }
    }
    return reg.l2_lambda * l2 + reg.l1_lambda * l1;
}

}  // namespace

std::vector<std::size_t> NetworkParams::layer_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.push_back(input_size());
    for (const LayerParams& l : layers) sizes.push_back(l.weights.rows());
    return sizes;
}

NetworkParams init_network(const std::vector<std::size_t>& sizes, const InitScheme& scheme,
                           Rng& rng) {
    if (sizes.size() < 2) throw ParamError("init_network: need at least two layer sizes");
    for (std::size_t s : sizes)
        if (s == 0) throw ParamError("init_network: layer sizes must be positive");

    NetworkParams net;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t fan_in = sizes[l];
        const std::size_t fan_out = sizes[l + 1];
        LayerParams layer{Matrix(fan_out, fan_in), Matrix(1, fan_out)};
        if (scheme.kind == InitScheme::Kind::gaussian) {
            for (double& w : layer.weights.data()) w = scheme.sigma * rng.normal();
        } else {
            if (scheme.k_nonzero > fan_in) {
                throw ParamError("init_network: sparse k_nonzero " +
                                 std::to_string(scheme.k_nonzero) + " exceeds fan-in " +
                                 std::to_string(fan_in));
            }
            for (std::size_t u = 0; u < fan_out; ++u) {
                auto picks = rng.permutation(fan_in);
                for (std::size_t p = 0; p < scheme.k_nonzero; ++p)
                    layer.weights(u, picks[p]) = scheme.sigma * rng.normal();
            }
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::vector<Matrix> forward(const NetworkParams& net, const Matrix& X) {
    ForwardPass fp = forward_masked(net, X, std::nullopt, nullptr);
    return std::move(fp.masked);
}

std::vector<Matrix> forward(const NetworkParams& net, const Matrix& X,
                            const std::optional<DropoutSpec>& dropout, Rng& rng) {
    ForwardPass fp = forward_masked(net, X, dropout, &rng);
    return std::move(fp.masked);
}

double loss(LossKind kind, const Matrix& pred, const Matrix& target,
            const RegularizerSpec& reg, const NetworkParams& net) {
    require_same_shape(pred, target, "loss");
    const double m = static_cast<double>(pred.rows());
    double data = 0.0;
    if (kind == LossKind::squared_error) {
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double d = target.data()[i] - pred.data()[i];
            data += d * d;
        }
    } else if (net.output_activation == ActivationKind::softmax) {
        // categorical form; matches the fused pred - target delta
        for (std::size_t i = 0; i < pred.size(); ++i)
            data -= target.data()[i] * std::log(clamp_prob(pred.data()[i]));
    } else {
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double p = clamp_prob(pred.data()[i]);
            const double t = target.data()[i];
            data -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        }
    }
    return data / m + regularization_penalty(reg, net);
}

Matrix output_delta(LossKind kind, ActivationKind output_activation, const Matrix& pred,
                    const Matrix& target) {
    require_same_shape(pred, target, "output_delta");
    if (kind == LossKind::cross_entropy) {
        if (output_activation != ActivationKind::softmax &&
            output_activation != ActivationKind::sigmoid) {
            throw ParamError("cross_entropy requires a sigmoid or softmax output layer");
        }
        return sub(pred, target);  // fused; exact for both pairings
    }
    if (output_activation == ActivationKind::softmax) {
        throw ParamError("softmax with squared_error is unsupported; use cross_entropy");
    }
    return hadamard(scale(sub(pred, target), 2.0),
                    activate_derivative(output_activation, pred));
}

Gradients backprop(const NetworkParams& net, const Matrix& X, const Matrix& Y,
                   LossKind loss_kind, const RegularizerSpec& reg,
                   const std::optional<DropoutSpec>& dropout, Rng& rng) {
    BackpropConfig cfg;
    cfg.loss = loss_kind;
    cfg.reg = reg;
    cfg.dropout = dropout;
    return backprop_ex(net, X, Y, cfg, rng);
}

Gradients backprop_ex(const NetworkParams& net, const Matrix& X, const Matrix& Y,
                      const BackpropConfig& cfg, Rng& rng, double* data_loss_out) {
    const std::size_t L = net.layers.size();
    if (Y.cols() != net.output_size()) {
        throw ShapeError("backprop: target has " + std::to_string(Y.cols()) +
                         " columns, network outputs " + std::to_string(net.output_size()));
    }
    ForwardPass fp = forward_masked(net, X, cfg.dropout, &rng);
    const double inv_m = 1.0 / static_cast<double>(X.rows());
    if (data_loss_out)
        *data_loss_out = loss(cfg.loss, fp.masked.back(), Y, RegularizerSpec{}, net);

    Gradients grads = gradients_like(net);
    Matrix delta = output_delta(cfg.loss, net.output_activation, fp.masked.back(), Y);

    for (std::size_t l = L; l-- > 0;) {
        // dJ/dW_l = delta^T a_{l-1} / m on the (post-dropout) layer input
        grads[l].weights = scale(matmul(transpose(delta), fp.masked[l]), inv_m);
        Matrix bias_grad(1, delta.cols());
        for (std::size_t i = 0; i < delta.rows(); ++i)
            for (std::size_t j = 0; j < delta.cols(); ++j) bias_grad(0, j) += delta(i, j);
        grads[l].bias = scale(bias_grad, inv_m);

        if (l > 0) {
            Matrix back = matmul(delta, net.layers[l].weights);
            if (!fp.masks[l].empty()) back = hadamard(back, fp.masks[l]);
            // penalty terms differentiate against the raw activation, so
            // they are added after the dropout mask
            if (l - 1 < cfg.hidden_delta_add.size() &&
                !cfg.hidden_delta_add[l - 1].empty()) {
                back = add_row_broadcast(back, cfg.hidden_delta_add[l - 1]);
            }
            delta = hadamard(back, activate_derivative(net.hidden_activation, fp.raw[l]));
        }
    }

    if (cfg.reg.l2_lambda != 0.0 || cfg.reg.l1_lambda != 0.0) {
        for (std::size_t l = 0; l < L; ++l) {
            const auto& w = net.layers[l].weights.data();
            auto& g = grads[l].weights.data();
            for (std::size_t i = 0; i < w.size(); ++i) {
                g[i] += 2.0 * cfg.reg.l2_lambda * w[i];
                if (w[i] > 0.0) g[i] += cfg.reg.l1_lambda;
                else if (w[i] < 0.0) g[i] -= cfg.reg.l1_lambda;
            }
        }
    }
    return grads;
}

std::vector<Matrix*> parameter_views(NetworkParams& net) {
    std::vector<Matrix*> views;
    for (LayerParams& l : net.layers) {
        views.push_back(&l.weights);
        views.push_back(&l.bias);
    }
    return views;
}

std::vector<Matrix> flatten(const Gradients& grads) {
    std::vector<Matrix> flat;
    for (const LayerParams& l : grads) {
        flat.push_back(l.weights);
        flat.push_back(l.bias);
    }
    return flat;
}

Gradients gradients_like(const NetworkParams& net) {
    Gradients g;
    for (const LayerParams& l : net.layers)
        g.push_back({Matrix(l.weights.rows(), l.weights.cols()),
                     Matrix(l.bias.rows(), l.bias.cols())});
    return g;
}

}  // namespace deepnet
