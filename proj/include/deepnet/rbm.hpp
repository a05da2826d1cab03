#pragma once

#include <cstdint>
#include <vector>

#include "deepnet/matrix.hpp"
#include "deepnet/rng.hpp"

namespace deepnet {

/// Restricted Boltzmann machine: W couples visible unit i to hidden unit
/// j (n_visible x n_hidden), a holds visible biases, b hidden biases.
struct RbmParams {
    Matrix W;  // n_visible x n_hidden
    Matrix a;  // 1 x n_visible
    Matrix b;  // 1 x n_hidden

    std::size_t n_visible() const { return W.rows(); }
    std::size_t n_hidden() const { return W.cols(); }
};

struct CdConfig {
    std::size_t k = 1;  // Gibbs steps
    double learning_rate = 0.1;
    double momentum = 0.0;
    double weight_decay = 0.0;  // L2, applied to W only
    std::size_t epochs = 10;
    std::size_t batch_size = 100;
    std::uint64_t seed = 0;
    // Reconstructions use probabilities by default; the chain's hidden
    // driving states are always sampled binary.
    bool binary_reconstruction = false;
    // Use sampled hidden states instead of probabilities in the positive
    // and final negative statistics.
    bool sampled_hidden_stats = false;
};

struct RbmVelocity {
    Matrix dW;  // momentum applies to W only
};

/// Joint energy -a.v - b.h - v^T W h for one binary configuration.
double energy(const RbmParams& rbm, const std::vector<double>& v,
              const std::vector<double>& h);

/// p(h_j = 1 | v) row-wise for a batch of visible vectors.
Matrix hidden_probs(const RbmParams& rbm, const Matrix& v_batch);
/// p(v_i = 1 | h) row-wise for a batch of hidden vectors.
Matrix visible_probs(const RbmParams& rbm, const Matrix& h_batch);

Matrix sample_bernoulli(const Matrix& probs, Rng& rng);

/// One contrastive-divergence update (CD-k) from a batch of visible
/// data. Returns the mean squared reconstruction error of the batch.
double cd_update(RbmParams& rbm, const Matrix& v_batch, const CdConfig& cfg,
                 RbmVelocity& velocity, Rng& rng);

/// Epoch loop over shuffled mini-batches of X; returns per-epoch mean
/// reconstruction error.
std::vector<double> train_rbm(RbmParams& rbm, const Matrix& X, const CdConfig& cfg,
                              Rng& rng);

/// W ~ N(0, 0.01^2), hidden biases zero, visible bias i set to
/// log(p_i / (1 - p_i)) where p_i is unit i's mean activation in the
/// training data, clamped to [1e-3, 1 - 1e-3].
RbmParams init_rbm(std::size_t n_visible, std::size_t n_hidden, const Matrix& train_data,
                   Rng& rng);

// Exact oracles by full enumeration of all 2^(n_v + n_h) joint
// configurations; guarded to at most 24 total units.
double exact_partition(const RbmParams& rbm);
double exact_log_partition(const RbmParams& rbm);
double exact_marginal(const RbmParams& rbm, const std::vector<double>& v);
double exact_loglik(const RbmParams& rbm, const Matrix& data);

struct RbmGradients {
    Matrix dW;
    Matrix da;
    Matrix db;
};

/// Exact gradient of the mean data log-likelihood: the data expectation
/// <v h> minus the model expectation computed by enumeration.
RbmGradients exact_loglik_gradient(const RbmParams& rbm, const Matrix& data);

}  // namespace deepnet
