#include "deepnet/rbm.hpp"

#include <algorithm>
#include <cmath>

#include "deepnet/activations.hpp"
#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

constexpr std::size_t kEnumerationGuard = 24;

void check_enumerable(const RbmParams& rbm) {
    if (rbm.n_visible() + rbm.n_hidden() > kEnumerationGuard) {
        throw CapacityError("exact enumeration limited to " +
                            std::to_string(kEnumerationGuard) + " total units, got " +
                            std::to_string(rbm.n_visible() + rbm.n_hidden()));
    }
}

std::vector<double> bits_to_vector(std::uint32_t bits, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (bits >> i) & 1u ? 1.0 : 0.0;
    return v;
}

double logsumexp(const std::vector<double>& xs) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : xs) m = std::max(m, x);
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

double energy(const RbmParams& rbm, const std::vector<double>& v,
              const std::vector<double>& h) {
    if (v.size() != rbm.n_visible() || h.size() != rbm.n_hidden()) {
        throw ShapeError("energy: configuration lengths " + std::to_string(v.size()) + "/" +
                         std::to_string(h.size()) + " do not match RBM " +
                         std::to_string(rbm.n_visible()) + "/" +
                         std::to_string(rbm.n_hidden()));
    }
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e -= rbm.a(0, i) * v[i];
    for (std::size_t j = 0; j < h.size(); ++j) e -= rbm.b(0, j) * h[j];
    for (std::size_t i = 0; i < v.size(); ++i) {
        double wh = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j) wh += rbm.W(i, j) * h[j];
        e -= v[i] * wh;
    }
    return e;
}

Matrix hidden_probs(const RbmParams& rbm, const Matrix& v_batch) {
    if (v_batch.cols() != rbm.n_visible()) {
        throw ShapeError("hidden_probs: batch has " + std::to_string(v_batch.cols()) +
                         " columns, RBM has " + std::to_string(rbm.n_visible()) +
                         " visible units");
    }
    return activate(ActivationKind::sigmoid,
                    add_row_broadcast(matmul(v_batch, rbm.W), rbm.b));
}

Matrix visible_probs(const RbmParams& rbm, const Matrix& h_batch) {
    if (h_batch.cols() != rbm.n_hidden()) {
        throw ShapeError("visible_probs: batch has " + std::to_string(h_batch.cols()) +
                         " columns, RBM has " + std::to_string(rbm.n_hidden()) +
                         " hidden units");
    }
    return activate(ActivationKind::sigmoid,
                    add_row_broadcast(matmul(h_batch, transpose(rbm.W)), rbm.a));
}

Matrix sample_bernoulli(const Matrix& probs, Rng& rng) {
    Matrix out(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs.data()[i];
        if (p < 0.0 || p > 1.0)
            throw ParamError("sample_bernoulli: probability " + std::to_string(p) +
                             " outside [0, 1]");
        out.data()[i] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    return out;
}

double cd_update(RbmParams& rbm, const Matrix& v_batch, const CdConfig& cfg,
                 RbmVelocity& velocity, Rng& rng) {
    if (v_batch.cols() != rbm.n_visible())
        throw ShapeError("cd_update: data width " + std::to_string(v_batch.cols()) +
                         " != visible units " + std::to_string(rbm.n_visible()));
    if (velocity.dW.empty()) velocity.dW = Matrix(rbm.W.rows(), rbm.W.cols());
    const double inv_b = 1.0 / static_cast<double>(v_batch.rows());

    // positive phase
    Matrix h0_probs = hidden_probs(rbm, v_batch);
    Matrix h0_states = sample_bernoulli(h0_probs, rng);
    const Matrix& h0_stats = cfg.sampled_hidden_stats ? h0_states : h0_probs;
    Matrix pos_W = matmul(transpose(v_batch), h0_stats);

    // k alternating Gibbs steps driven by binary hidden states
    Matrix vk;
    Matrix hk_probs;
    Matrix h_drive = h0_states;
    for (std::size_t step = 0; step < cfg.k; ++step) {
        vk = visible_probs(rbm, h_drive);
        if (cfg.binary_reconstruction) vk = sample_bernoulli(vk, rng);
        hk_probs = hidden_probs(rbm, vk);
        if (step + 1 < cfg.k) h_drive = sample_bernoulli(hk_probs, rng);
    }
    Matrix hk_sampled;
    if (cfg.sampled_hidden_stats) hk_sampled = sample_bernoulli(hk_probs, rng);
    const Matrix& hk_stats = cfg.sampled_hidden_stats ? hk_sampled : hk_probs;
    Matrix neg_W = matmul(transpose(vk), hk_stats);

    // weight update with momentum and decay; bias updates are plain
    Matrix grad_W = scale(sub(pos_W, neg_W), inv_b);
    if (cfg.weight_decay != 0.0) add_scaled_in_place(grad_W, rbm.W, -2.0 * cfg.weight_decay);
    scale_in_place(velocity.dW, cfg.momentum);
    add_scaled_in_place(velocity.dW, grad_W, cfg.learning_rate);
    add_scaled_in_place(rbm.W, velocity.dW, 1.0);

    Matrix v_diff = sub(v_batch, vk);
    Matrix h_diff = sub(h0_stats, hk_stats);
    for (std::size_t i = 0; i < rbm.n_visible(); ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < v_diff.rows(); ++r) s += v_diff(r, i);
        rbm.a(0, i) += cfg.learning_rate * s * inv_b;
    }
    for (std::size_t j = 0; j < rbm.n_hidden(); ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < h_diff.rows(); ++r) s += h_diff(r, j);
        rbm.b(0, j) += cfg.learning_rate * s * inv_b;
    }

    return frobenius_sq(v_diff) / static_cast<double>(v_diff.size());
}

std::vector<double> train_rbm(RbmParams& rbm, const Matrix& X, const CdConfig& cfg,
                              Rng& rng) {
    const std::size_t m = X.rows();
    if (m == 0) throw ParamError("train_rbm: empty training data");
    const std::size_t b = std::min(cfg.batch_size, m);
    RbmVelocity velocity;
    std::vector<double> curve;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto order = rng.permutation(m);
        double err_sum = 0.0;
        for (std::size_t start = 0; start < m; start += b) {
            const std::size_t len = std::min(b, m - start);
            std::span<const std::size_t> idx(order.data() + start, len);
            Matrix batch = take_rows(X, idx);
            err_sum += cd_update(rbm, batch, cfg, velocity, rng) * static_cast<double>(len);
        }
        curve.push_back(err_sum / static_cast<double>(m));
    }
    return curve;
}

RbmParams init_rbm(std::size_t n_visible, std::size_t n_hidden, const Matrix& train_data,
                   Rng& rng) {
    if (train_data.rows() == 0) throw ParamError("init_rbm: empty training data");
    if (train_data.cols() != n_visible)
        throw ParamError("init_rbm: training data width " +
                         std::to_string(train_data.cols()) + " != n_visible " +
                         std::to_string(n_visible));
    RbmParams rbm{Matrix(n_visible, n_hidden), Matrix(1, n_visible), Matrix(1, n_hidden)};
    for (double& w : rbm.W.data()) w = 0.01 * rng.normal();
    Matrix p = col_means(train_data);
    for (std::size_t i = 0; i < n_visible; ++i) {
        const double pi = std::clamp(p(0, i), 1e-3, 1.0 - 1e-3);
        rbm.a(0, i) = std::log(pi / (1.0 - pi));
    }
    return rbm;
}

double exact_log_partition(const RbmParams& rbm) {
    check_enumerable(rbm);
    const std::size_t nv = rbm.n_visible(), nh = rbm.n_hidden();
    std::vector<double> terms;
    terms.reserve(std::size_t{1} << (nv + nh));
    for (std::uint32_t vb = 0; vb < (1u << nv); ++vb) {
        const auto v = bits_to_vector(vb, nv);
        for (std::uint32_t hb = 0; hb < (1u << nh); ++hb) {
            terms.push_back(-energy(rbm, v, bits_to_vector(hb, nh)));
        }
    }
    return logsumexp(terms);
}

double exact_partition(const RbmParams& rbm) { return std::exp(exact_log_partition(rbm)); }

double exact_marginal(const RbmParams& rbm, const std::vector<double>& v) {
    check_enumerable(rbm);
    const std::size_t nh = rbm.n_hidden();
    std::vector<double> terms;
    terms.reserve(std::size_t{1} << nh);
    for (std::uint32_t hb = 0; hb < (1u << nh); ++hb)
        terms.push_back(-energy(rbm, v, bits_to_vector(hb, nh)));
    return std::exp(logsumexp(terms) - exact_log_partition(rbm));
}

double exact_loglik(const RbmParams& rbm, const Matrix& data) {
    check_enumerable(rbm);
    const double log_z = exact_log_partition(rbm);
    const std::size_t nh = rbm.n_hidden();
    double total = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
        std::vector<double> v(data.row(r).begin(), data.row(r).end());
        std::vector<double> terms;
        terms.reserve(std::size_t{1} << nh);
        for (std::uint32_t hb = 0; hb < (1u << nh); ++hb)
            terms.push_back(-energy(rbm, v, bits_to_vector(hb, nh)));
        total += logsumexp(terms) - log_z;
    }
    return total / static_cast<double>(data.rows());
}

RbmGradients exact_loglik_gradient(const RbmParams& rbm, const Matrix& data) {
    check_enumerable(rbm);
    const std::size_t nv = rbm.n_visible(), nh = rbm.n_hidden();

    // data expectation: h integrated out through p(h_j = 1 | v)
    Matrix hp = hidden_probs(rbm, data);
    const double inv_m = 1.0 / static_cast<double>(data.rows());
    RbmGradients g{Matrix(nv, nh), Matrix(1, nv), Matrix(1, nh)};
    g.dW = scale(matmul(transpose(data), hp), inv_m);
    g.da = col_means(data);
    g.db = col_means(hp);

    // model expectation by enumeration over every joint configuration
    const double log_z = exact_log_partition(rbm);
    for (std::uint32_t vb = 0; vb < (1u << nv); ++vb) {
        const auto v = bits_to_vector(vb, nv);
        for (std::uint32_t hb = 0; hb < (1u << nh); ++hb) {
            const auto h = bits_to_vector(hb, nh);
            const double p = std::exp(-energy(rbm, v, h) - log_z);
            for (std::size_t i = 0; i < nv; ++i) {
                g.da(0, i) -= p * v[i];
                for (std::size_t j = 0; j < nh; ++j) g.dW(i, j) -= p * v[i] * h[j];
            }
            for (std::size_t j = 0; j < nh; ++j) g.db(0, j) -= p * h[j];
        }
    }
    return g;
}

}  // namespace deepnet
