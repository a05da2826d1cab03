#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "deepnet/errors.hpp"
#include "deepnet/optim.hpp"
#include "deepnet/rng.hpp"

using namespace deepnet;

namespace {

// 1-D quadratic J(theta) = theta^2 as the simplest trainable
class Quadratic final : public Trainable {
public:
    explicit Quadratic(double start) : theta_(1, 1) { theta_(0, 0) = start; }

    std::vector<Matrix*> parameters() override { return {&theta_}; }

    std::vector<Matrix> gradient(const Matrix&, const Matrix&, double& loss) override {
        loss = theta_(0, 0) * theta_(0, 0);
        Matrix g(1, 1);
        g(0, 0) = 2.0 * theta_(0, 0);
        return {g};
    }

    double value() const { return theta_(0, 0); }

private:
    Matrix theta_;
};

// linear model trained by least squares; gradient depends on the batch,
// so update trajectories reveal the visit order
class LinearModel final : public Trainable {
public:
    explicit LinearModel(std::size_t dim) : w_(1, dim) {}

    std::vector<Matrix*> parameters() override { return {&w_}; }

    std::vector<Matrix> gradient(const Matrix& X, const Matrix& Y,
                                 double& loss) override {
        Matrix pred = matmul(X, transpose(w_));
        Matrix diff = sub(pred, Y);
        loss = frobenius_sq(diff) / double(X.rows());
        Matrix g = scale(matmul(transpose(diff), X), 2.0 / double(X.rows()));
        return {g};
    }

    Matrix weights() const { return w_; }

private:
    Matrix w_;
};

}  // namespace

TEST_CASE("momentum_step") {
    SUBCASE("plain gradient step when mu is zero") {
        Matrix theta(1, 1);
        Matrix grad{{1.0}};
        std::vector<Matrix*> params{&theta};
        std::vector<Matrix> velocity;
        momentum_step(params, {grad}, velocity, 0.1, 0.0);
        CHECK(theta(0, 0) == doctest::Approx(-0.1).epsilon(1e-15));
    }
    SUBCASE("two steps from rest follow the recurrence") {
        Matrix theta(1, 1);
        Matrix grad{{1.0}};
        std::vector<Matrix*> params{&theta};
        std::vector<Matrix> velocity;
        momentum_step(params, {grad}, velocity, 0.1, 0.5);
        CHECK(velocity[0](0, 0) == doctest::Approx(-0.1).epsilon(1e-15));
        momentum_step(params, {grad}, velocity, 0.1, 0.5);
        CHECK(velocity[0](0, 0) == doctest::Approx(-0.15).epsilon(1e-15));
    }
    SUBCASE("steady state amplifies by 1/(1-mu)") {
        Matrix theta(1, 1);
        Matrix grad{{1.0}};
        std::vector<Matrix*> params{&theta};
        std::vector<Matrix> velocity;
        for (int i = 0; i < 200; ++i) momentum_step(params, {grad}, velocity, 0.1, 0.5);
        CHECK(velocity[0](0, 0) == doctest::Approx(-0.2).epsilon(1e-9));
    }
    SUBCASE("shape mismatch") {
        Matrix theta(1, 1);
        Matrix grad(2, 1);
        std::vector<Matrix*> params{&theta};
        std::vector<Matrix> velocity;
        CHECK_THROWS_AS(momentum_step(params, {grad}, velocity, 0.1, 0.0), ShapeError);
    }
}

TEST_CASE("batch descent contracts a quadratic monotonically") {
    Quadratic q(3.0);
    OptimizerConfig cfg;
    cfg.algorithm = GdMode::batch;
    cfg.learning_rate = 0.1;
    cfg.epochs = 30;
    Matrix X(1, 1), Y(1, 1);
    double prev = 3.0;
    TrainMonitors monitors;
    monitors.on_epoch = [&](const EpochRecord&) {
        CHECK(std::abs(q.value()) < std::abs(prev));
        prev = q.value();
    };
    run_epochs(q, X, Y, cfg, monitors);
    CHECK(std::abs(q.value()) < 1e-2);  // 0.8^30 * 3
}

TEST_CASE("degenerate batch sizes coincide") {
    Rng rng(3);
    Matrix X(12, 3), Y(12, 1);
    for (double& v : X.data()) v = rng.uniform();
    for (double& v : Y.data()) v = rng.uniform();

    auto run = [&](GdMode mode, std::size_t batch) {
        LinearModel model(3);
        OptimizerConfig cfg;
        cfg.algorithm = mode;
        cfg.learning_rate = 0.05;
        cfg.batch_size = batch;
        cfg.epochs = 7;
        cfg.shuffle_seed = 99;
        run_epochs(model, X, Y, cfg);
        return model.weights();
    };

    // minibatch with b = m walks the same shuffled slices as batch mode
    CHECK(run(GdMode::minibatch, 12) == run(GdMode::batch, 0));
    // minibatch with b = 1 is stochastic descent by definition
    CHECK(run(GdMode::minibatch, 1) == run(GdMode::stochastic, 0));
}

TEST_CASE("each epoch visits every example exactly once") {
    Matrix X(10, 1), Y(10, 1);
    for (std::size_t i = 0; i < 10; ++i) X(i, 0) = double(i);

    class Recorder final : public Trainable {
    public:
        Matrix dummy{1, 1};
        std::vector<double> seen;
        std::vector<Matrix*> parameters() override { return {&dummy}; }
        std::vector<Matrix> gradient(const Matrix& X, const Matrix&,
                                     double& loss) override {
            loss = 0.0;
            for (std::size_t i = 0; i < X.rows(); ++i) seen.push_back(X(i, 0));
            return {Matrix(1, 1)};
        }
    } recorder;

    OptimizerConfig cfg;
    cfg.algorithm = GdMode::minibatch;
    cfg.batch_size = 3;  // uneven: slices of 3,3,3,1
    cfg.epochs = 2;
    cfg.shuffle_seed = 5;
    run_epochs(recorder, X, Y, cfg);
    REQUIRE(recorder.seen.size() == 20);
    for (int epoch = 0; epoch < 2; ++epoch) {
        std::vector<double> slice(recorder.seen.begin() + epoch * 10,
                                  recorder.seen.begin() + (epoch + 1) * 10);
        std::sort(slice.begin(), slice.end());
        for (std::size_t i = 0; i < 10; ++i) CHECK(slice[i] == double(i));
    }
}

TEST_CASE("batch size validation") {
    Quadratic q(1.0);
    Matrix X(3, 1), Y(3, 1);
    OptimizerConfig cfg;
    cfg.algorithm = GdMode::minibatch;
    cfg.batch_size = 4;  // > m
    CHECK_THROWS_AS(run_epochs(q, X, Y, cfg), ParamError);
}

TEST_CASE("early stopping") {
    SUBCASE("single minimum, patience 1") {
        EarlyStopper stopper({1, 0.0});
        const double errors[] = {5, 4, 3, 4, 5};
        std::size_t stopped_after = 0;
        for (std::size_t e = 1; e <= 5; ++e) {
            stopper.record(e, errors[e - 1]);
            if (stopper.should_stop()) {
                stopped_after = e;
                break;
            }
        }
        CHECK(stopped_after == 5);
        CHECK(stopper.best_epoch() == 3);
        CHECK(stopper.best_error() == 3.0);
    }
    SUBCASE("monotone decrease never stops") {
        EarlyStopper stopper({0, 0.0});
        for (std::size_t e = 1; e <= 50; ++e) {
            stopper.record(e, 1.0 / double(e));
            CHECK_FALSE(stopper.should_stop());
        }
    }
    SUBCASE("improvement of exactly min_delta does not count") {
        EarlyStopper stopper({0, 0.5});
        CHECK(stopper.record(1, 10.0));
        CHECK_FALSE(stopper.record(2, 9.5));  // exactly min_delta lower
        CHECK(stopper.should_stop());
    }
}

TEST_CASE("run_epochs restores the best-validation snapshot") {
    // validation error mirrors |theta - 2|: training drives theta from 8
    // toward 0, so validation bottoms out near 2 and climbs again
    Quadratic q(8.0);
    Matrix X(1, 1), Y(1, 1);
    OptimizerConfig cfg;
    cfg.algorithm = GdMode::batch;
    cfg.learning_rate = 0.05;
    cfg.epochs = 60;
    TrainMonitors monitors;
    monitors.validation_error = [&]() { return std::abs(q.value() - 2.0); };
    monitors.early_stopping = EarlyStoppingConfig{3, 0.0};
    TrainingHistory history = run_epochs(q, X, Y, cfg, monitors);
    CHECK(history.size() < 60);  // stopped early
    double best = 1e9;
    for (const auto& rec : history) best = std::min(best, rec.val_error);
    CHECK(std::abs(q.value() - 2.0) == best);
}

TEST_CASE("finite differences") {
    SUBCASE("exact on quadratics") {
        auto f = [](const std::vector<Matrix>& p) { return p[0](0, 0) * p[0](0, 0); };
        Matrix theta{{3.0}};
        for (double eps : {1e-2, 1e-4, 1e-6}) {
            auto g = finite_diff_gradient(f, {theta}, eps);
            CHECK(g[0](0, 0) == doctest::Approx(6.0).epsilon(1e-9));
        }
    }
    SUBCASE("zero on constants") {
        auto f = [](const std::vector<Matrix>&) { return 4.2; };
        auto g = finite_diff_gradient(f, {Matrix(2, 3)}, 1e-4);
        CHECK(g[0] == Matrix(2, 3));
    }
    SUBCASE("one-sided variant approximates too") {
        auto f = [](const std::vector<Matrix>& p) { return p[0](0, 0) * p[0](0, 0); };
        Matrix theta{{3.0}};
        auto g = finite_diff_gradient(f, {theta}, 1e-6, true);
        CHECK(g[0](0, 0) == doctest::Approx(6.0).epsilon(1e-5));
    }
    SUBCASE("non-finite objective raises") {
        auto f = [](const std::vector<Matrix>& p) {
            return std::log(p[0](0, 0));  // -inf at 0+eps side
        };
        CHECK_THROWS_AS(static_cast<void>(finite_diff_gradient(f, {Matrix{{-1.0}}}, 1e-4)),
                        NumericError);
    }
}

TEST_CASE("update ratio report") {
    Matrix weights(10, 10);
    for (double& v : weights.data()) v = 1.0;
    Matrix updates(10, 10);
    for (double& v : updates.data()) v = 0.001;
    auto report = update_ratio_report({&weights}, {&updates});
    REQUIRE(report.size() == 1);
    CHECK(report[0].ratio == doctest::Approx(0.001).epsilon(1e-12));
    CHECK_FALSE(report[0].out_of_band);

    Matrix zero_update(10, 10);
    auto r2 = update_ratio_report({&weights}, {&zero_update});
    CHECK(r2[0].ratio == 0.0);
    CHECK(r2[0].out_of_band);

    Matrix big(10, 10);
    for (double& v : big.data()) v = 0.2;
    Matrix w2(10, 10);
    for (double& v : w2.data()) v = 2.0;
    auto r3 = update_ratio_report({&w2}, {&big});
    CHECK(r3[0].ratio == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(r3[0].out_of_band);

    Matrix zeros(10, 10);
    auto r4 = update_ratio_report({&zeros}, {&big});
    CHECK(std::isinf(r4[0].ratio));
    CHECK(r4[0].out_of_band);
}
