#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "deepnet/matrix.hpp"

namespace deepnet {

enum class GdMode { batch, stochastic, minibatch };

struct OptimizerConfig {
    GdMode algorithm = GdMode::minibatch;
    double learning_rate = 1.0;
    double momentum = 0.0;
    std::size_t batch_size = 100;  // minibatch only
    std::size_t epochs = 10;
    std::uint64_t shuffle_seed = 0;
};

struct EarlyStoppingConfig {
    std::size_t patience = 0;
    double min_delta = 0.0;
};

/// Tracks the best validation error seen so far. An epoch improves only
/// if it beats the best by strictly more than min_delta; training stops
/// once the count of consecutive non-improving epochs exceeds patience.
class EarlyStopper {
public:
    explicit EarlyStopper(EarlyStoppingConfig cfg) : cfg_(cfg) {}

    bool record(std::size_t epoch, double val_error);  // true if improved
    bool should_stop() const { return since_improve_ > cfg_.patience; }
    double best_error() const { return best_; }
    std::size_t best_epoch() const { return best_epoch_; }

private:
    EarlyStoppingConfig cfg_;
    double best_ = std::numeric_limits<double>::infinity();
    std::size_t best_epoch_ = 0;
    std::size_t since_improve_ = 0;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_error = std::numeric_limits<double>::quiet_NaN();
};
using TrainingHistory = std::vector<EpochRecord>;

/// Anything the gradient-descent loops can train. Parameter views stay
/// valid for the duration of run_epochs; gradient() returns matrices
/// aligned with parameters() and reports the batch loss it was taken at.
class Trainable {
public:
    virtual ~Trainable() = default;
    virtual std::vector<Matrix*> parameters() = 0;
    virtual std::vector<Matrix> gradient(const Matrix& X, const Matrix& Y,
                                         double& batch_loss) = 0;
};

struct TrainMonitors {
    std::function<double()> validation_error{};  // classification error etc.
    std::optional<EarlyStoppingConfig> early_stopping{};
    std::function<void(const EpochRecord&)> on_epoch{};
};

/// velocity <- mu * velocity - alpha * grad; params <- params + velocity.
/// mu = 0 reduces to a plain gradient step. velocity must be zero-shaped
/// like params on first use (an empty vector is initialized here).
void momentum_step(std::vector<Matrix*>& params, const std::vector<Matrix>& grads,
                   std::vector<Matrix>& velocity, double alpha, double mu);

/// Gradient-descent epochs over (X, Y). batch does one update per epoch
/// over all rows, stochastic does one update per row, minibatch walks
/// ceil(m/b) contiguous slices of a fresh shuffle (last slice may be
/// short). Rows are reshuffled every epoch from shuffle_seed. When early
/// stopping is active the best-validation parameter snapshot is restored
/// before returning.
TrainingHistory run_epochs(Trainable& trainable, const Matrix& X, const Matrix& Y,
                           const OptimizerConfig& cfg, const TrainMonitors& monitors = {});

/// Symmetric finite differences: (f(t+eps e_i) - f(t-eps e_i)) / 2 eps,
/// exact on quadratics. one_sided uses (f(t+eps e_i) - f(t)) / eps.
std::vector<Matrix> finite_diff_gradient(
    const std::function<double(const std::vector<Matrix>&)>& f,
    std::vector<Matrix> params, double eps, bool one_sided = false);

struct UpdateRatio {
    double ratio = 0.0;  // RMS(update) / RMS(weights); +inf on zero weights
    bool out_of_band = false;
};

/// Per-layer report of update magnitude relative to weight magnitude.
/// Healthy training sits around 1e-3; layers outside [1e-4, 1e-2] are
/// flagged.
std::vector<UpdateRatio> update_ratio_report(const std::vector<const Matrix*>& params,
                                             const std::vector<const Matrix*>& updates);

}  // namespace deepnet
