#pragma once

#include <string>

#include "deepnet/matrix.hpp"

namespace deepnet {

enum class ActivationKind { sigmoid, softmax, relu, softplus, linear };
enum class LossKind { squared_error, cross_entropy };

std::string to_string(ActivationKind k);
std::string to_string(LossKind k);
ActivationKind activation_from_string(const std::string& s);
LossKind loss_from_string(const std::string& s);

double sigmoid(double x);

/// Apply an activation to pre-activations z. softmax acts row-wise (one
/// row per example) with the row max subtracted first, so shifting a
/// row's logits by a constant leaves the output unchanged.
Matrix activate(ActivationKind kind, const Matrix& z);

/// Derivative expressed through the activation *output* a:
///   sigmoid  -> a(1-a)
///   relu     -> 1 where a > 0 (equivalently where z > 0)
///   softplus -> 1 - exp(-a), which equals sigmoid(z)
///   linear   -> 1
/// softmax has no standalone derivative here; it is only used fused with
/// the cross-entropy loss.
Matrix activate_derivative(ActivationKind kind, const Matrix& a);

}  // namespace deepnet
