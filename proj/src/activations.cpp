#include "deepnet/activations.hpp"

#include <algorithm>
#include <cmath>

#include "deepnet/errors.hpp"

namespace deepnet {

std::string to_string(ActivationKind k) {
    switch (k) {
        case ActivationKind::sigmoid: return "sigmoid";
        case ActivationKind::softmax: return "softmax";
        case ActivationKind::relu: return "relu";
        case ActivationKind::softplus: return "softplus";
        case ActivationKind::linear: return "linear";
    }
    return "?";
}

std::string to_string(LossKind k) {
    return k == LossKind::squared_error ? "squared_error" : "cross_entropy";
}

ActivationKind activation_from_string(const std::string& s) {
    if (s == "sigmoid") return ActivationKind::sigmoid;
    if (s == "softmax") return ActivationKind::softmax;
    if (s == "relu") return ActivationKind::relu;
    if (s == "softplus") return ActivationKind::softplus;
    if (s == "linear") return ActivationKind::linear;
    throw ParamError("unknown activation '" + s + "'");
}

LossKind loss_from_string(const std::string& s) {
    if (s == "squared_error") return LossKind::squared_error;
    if (s == "cross_entropy") return LossKind::cross_entropy;
    throw ParamError("unknown loss '" + s + "'");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Matrix activate(ActivationKind kind, const Matrix& z) {
    switch (kind) {
        case ActivationKind::sigmoid:
            return map(z, [](double x) { return sigmoid(x); });
        case ActivationKind::relu:
            return map(z, [](double x) { return x > 0.0 ? x : 0.0; });
        case ActivationKind::softplus:
            // log1p(exp(x)) overflows for large x; x + log1p(exp(-x)) does not.
            return map(z, [](double x) {
                return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
            });
        case ActivationKind::linear:
            return z;
        case ActivationKind::softmax: {
            Matrix out(z.rows(), z.cols());
            for (std::size_t i = 0; i < z.rows(); ++i) {
                auto zi = z.row(i);
                const double m = *std::max_element(zi.begin(), zi.end());
                double sum = 0.0;
                for (std::size_t j = 0; j < z.cols(); ++j) {
                    out(i, j) = std::exp(zi[j] - m);
                    sum += out(i, j);
                }
                for (std::size_t j = 0; j < z.cols(); ++j) out(i, j) /= sum;
            }
            return out;
        }
    }
    throw ParamError("unknown activation kind");
}

Matrix activate_derivative(ActivationKind kind, const Matrix& a) {
    switch (kind) {
        case ActivationKind::sigmoid:
            return map(a, [](double v) { return v * (1.0 - v); });
        case ActivationKind::relu:
            return map(a, [](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case ActivationKind::softplus:
            return map(a, [](double v) { return 1.0 - std::exp(-v); });
        case ActivationKind::linear:
            return map(a, [](double) { return 1.0; });
        case ActivationKind::softmax:
            throw ParamError(
                "softmax has no standalone derivative; pair it with cross_entropy");
    }
    throw ParamError("unknown activation kind");
}

}  // namespace deepnet
