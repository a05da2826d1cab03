#include "deepnet/optim.hpp"

#include <cmath>

#include "deepnet/errors.hpp"
#include "deepnet/rng.hpp"

namespace deepnet {

bool EarlyStopper::record(std::size_t epoch, double val_error) {
    if (best_ - val_error > cfg_.min_delta) {
        best_ = val_error;
        best_epoch_ = epoch;
        since_improve_ = 0;
        return true;
    }
    ++since_improve_;
    return false;
}

void momentum_step(std::vector<Matrix*>& params, const std::vector<Matrix>& grads,
                   std::vector<Matrix>& velocity, double alpha, double mu) {
    if (params.size() != grads.size())
        throw ShapeError("momentum_step: parameter/gradient count mismatch");
    if (velocity.empty()) {
        for (const Matrix* p : params) velocity.emplace_back(p->rows(), p->cols());
    }
    if (velocity.size() != params.size())
        throw ShapeError("momentum_step: velocity count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        require_same_shape(*params[i], grads[i], "momentum_step");
        require_same_shape(*params[i], velocity[i], "momentum_step");
        auto& v = velocity[i].data();
        auto& p = params[i]->data();
        const auto& g = grads[i].data();
        for (std::size_t k = 0; k < v.size(); ++k) {
            v[k] = mu * v[k] - alpha * g[k];
            p[k] += v[k];
        }
    }
}

TrainingHistory run_epochs(Trainable& trainable, const Matrix& X, const Matrix& Y,
                           const OptimizerConfig& cfg, const TrainMonitors& monitors) {
    const std::size_t m = X.rows();
    if (m == 0) throw ParamError("run_epochs: empty dataset");
    if (Y.rows() != m) throw ShapeError("run_epochs: X and Y row counts differ");
    if (cfg.learning_rate <= 0.0) throw ParamError("run_epochs: learning rate must be > 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
        throw ParamError("run_epochs: momentum must be in [0, 1)");

    std::size_t b = m;
    if (cfg.algorithm == GdMode::stochastic) b = 1;
    if (cfg.algorithm == GdMode::minibatch) b = cfg.batch_size;
    if (b == 0 || b > m) {
        throw ParamError("run_epochs: batch size " + std::to_string(b) +
                         " outside [1, " + std::to_string(m) + "]");
    }

    std::vector<Matrix*> params = trainable.parameters();
    std::vector<Matrix> velocity;
    Rng shuffle_rng(cfg.shuffle_seed);

    std::optional<EarlyStopper> stopper;
    std::vector<Matrix> best_snapshot;
    if (monitors.early_stopping) {
        if (!monitors.validation_error)
            throw ParamError("run_epochs: early stopping needs a validation monitor");
        stopper.emplace(*monitors.early_stopping);
    }

    TrainingHistory history;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        auto order = shuffle_rng.permutation(m);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < m; start += b) {
            const std::size_t len = std::min(b, m - start);
            std::span<const std::size_t> idx(order.data() + start, len);
            Matrix bx = take_rows(X, idx);
            Matrix by = take_rows(Y, idx);
            double batch_loss = 0.0;
            std::vector<Matrix> grads = trainable.gradient(bx, by, batch_loss);
            if (!std::isfinite(batch_loss))
                throw NumericError("run_epochs: non-finite training loss at epoch " +
                                   std::to_string(epoch));
            loss_sum += batch_loss * static_cast<double>(len);
            momentum_step(params, grads, velocity, cfg.learning_rate, cfg.momentum);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(m);
        if (monitors.validation_error) rec.val_error = monitors.validation_error();
        history.push_back(rec);
        if (monitors.on_epoch) monitors.on_epoch(rec);

        if (stopper) {
            if (stopper->record(epoch, rec.val_error)) {
                best_snapshot.clear();
                for (const Matrix* p : params) best_snapshot.push_back(*p);
            }
            if (stopper->should_stop()) break;
        }
    }

    if (stopper && !best_snapshot.empty()) {
        for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best_snapshot[i];
    }
    return history;
}

std::vector<Matrix> finite_diff_gradient(
    const std::function<double(const std::vector<Matrix>&)>& f,
    std::vector<Matrix> params, double eps, bool one_sided) {
    if (eps <= 0.0) throw ParamError("finite_diff_gradient: eps must be > 0");
    std::vector<Matrix> grads;
    grads.reserve(params.size());
    const double f0 = one_sided ? f(params) : 0.0;
    if (one_sided && !std::isfinite(f0))
        throw NumericError("finite_diff_gradient: non-finite objective");
    for (std::size_t p = 0; p < params.size(); ++p) {
        Matrix g(params[p].rows(), params[p].cols());
        for (std::size_t k = 0; k < params[p].size(); ++k) {
            const double saved = params[p].data()[k];
            params[p].data()[k] = saved + eps;
            const double fp = f(params);
            double d;
            if (one_sided) {
                d = (fp - f0) / eps;
            } else {
                params[p].data()[k] = saved - eps;
                const double fm = f(params);
                if (!std::isfinite(fm))
                    throw NumericError("finite_diff_gradient: non-finite objective");
                d = (fp - fm) / (2.0 * eps);
            }
            if (!std::isfinite(fp) || !std::isfinite(d))
                throw NumericError("finite_diff_gradient: non-finite objective");
            params[p].data()[k] = saved;
            g.data()[k] = d;
        }
        grads.push_back(std::move(g));
    }
    return grads;
}

std::vector<UpdateRatio> update_ratio_report(const std::vector<const Matrix*>& params,
                                             const std::vector<const Matrix*>& updates) {
    if (params.size() != updates.size())
        throw ShapeError("update_ratio_report: list size mismatch");
    std::vector<UpdateRatio> report;
    for (std::size_t i = 0; i < params.size(); ++i) {
        require_same_shape(*params[i], *updates[i], "update_ratio_report");
        const double n = static_cast<double>(params[i]->size());
        const double rms_w = std::sqrt(frobenius_sq(*params[i]) / n);
        const double rms_u = std::sqrt(frobenius_sq(*updates[i]) / n);
        UpdateRatio r;
        if (rms_w == 0.0) {
            r.ratio = std::numeric_limits<double>::infinity();
            r.out_of_band = true;
        } else {
            r.ratio = rms_u / rms_w;
            r.out_of_band = r.ratio < 1e-4 || r.ratio > 1e-2;
        }
        report.push_back(r);
    }
    return report;
}

}  // namespace deepnet
