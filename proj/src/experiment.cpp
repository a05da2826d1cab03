#include "deepnet/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

GdMode gd_mode_from_string(const std::string& s) {
    if (s == "batch") return GdMode::batch;
    if (s == "stochastic") return GdMode::stochastic;
    return GdMode::minibatch;
}

CorruptionKind corruption_from_string(const std::string& s) {
    if (s == "masking") return CorruptionKind::masking;
    if (s == "salt_pepper") return CorruptionKind::salt_pepper;
    return CorruptionKind::none;
}

Dataset head(const Dataset& ds, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Dataset out;
    out.X = take_rows(ds.X, idx);
    out.Y = take_rows(ds.Y, idx);
    out.y.assign(ds.y.begin(), ds.y.begin() + std::ptrdiff_t(n));
    return out;
}

OptimizerConfig make_opt(const ExperimentConfig& cfg, double rate, std::size_t epochs,
                         std::uint64_t shuffle_seed) {
    OptimizerConfig opt;
    opt.algorithm = gd_mode_from_string(cfg.algorithm);
    opt.learning_rate = rate;
    opt.momentum = cfg.momentum;
    opt.batch_size = cfg.batch_size;
    opt.epochs = epochs;
    opt.shuffle_seed = shuffle_seed;
    return opt;
}

StackSpec make_stack_spec(const ExperimentConfig& cfg) {
    StackSpec spec;
    spec.hidden_sizes = cfg.hidden_sizes;
    if (cfg.model == "dbn") {
        spec.unit_kind = UnitKind::rbm;
        spec.cd.k = cfg.cd_k;
        spec.cd.learning_rate = cfg.learning_rate;
        spec.cd.momentum = cfg.momentum;
        spec.cd.weight_decay = cfg.l2_lambda;
        spec.cd.epochs = cfg.epochs_pretrain;
        spec.cd.batch_size = cfg.batch_size;
    } else {
        spec.unit_kind = UnitKind::autoencoder;
        spec.ae.opt = {GdMode::minibatch, cfg.learning_rate, cfg.momentum, cfg.batch_size,
                       cfg.epochs_pretrain, cfg.seed + 1};
        spec.ae.init_sigma = cfg.init_sigma;
        if (cfg.sparsity_weight > 0.0)
            spec.ae.sparsity = SparsityConfig{cfg.sparsity_target, cfg.sparsity_weight};
        if (cfg.model == "sdae")
            spec.ae.corruption = {corruption_from_string(cfg.corruption),
                                  cfg.corruption_level};
    }
    return spec;
}

FinetuneConfig make_finetune_cfg(const ExperimentConfig& cfg) {
    FinetuneConfig fin;
    fin.opt = make_opt(cfg, cfg.effective_finetune_rate(), cfg.epochs_finetune,
                       cfg.seed + 2);
    fin.loss = loss_from_string(cfg.loss);
    fin.reg = {cfg.l2_lambda, cfg.l1_lambda};
    if (cfg.dropout_retain_input < 1.0 || cfg.dropout_retain_hidden < 1.0)
        fin.dropout = DropoutSpec{cfg.dropout_retain_input, cfg.dropout_retain_hidden};
    if (cfg.patience >= 0)
        fin.early_stopping = EarlyStoppingConfig{std::size_t(cfg.patience), cfg.min_delta};
    return fin;
}

}  // namespace

DatasetBundle load_data(const DataConfig& cfg) {
    DatasetBundle bundle;
    if (cfg.format == "idx") {
        IdxImages train_img = load_idx_images(cfg.train_images);
        IdxImages test_img = load_idx_images(cfg.test_images);
        std::vector<int> train_y = load_idx_labels(cfg.train_labels);
        std::vector<int> test_y = load_idx_labels(cfg.test_labels);
        if (train_img.count != train_y.size() || test_img.count != test_y.size())
            throw FormatError("image/label counts disagree");
        Matrix train_X = normalize_255(train_img.to_matrix());
        Matrix test_X = normalize_255(test_img.to_matrix());
        if (cfg.resize) {
            train_X = downsample_rows_2x(train_X, train_img.rows, train_img.cols);
            test_X = downsample_rows_2x(test_X, test_img.rows, test_img.cols);
        }
        bundle.train = make_dataset(std::move(train_X), std::move(train_y), cfg.n_classes);
        bundle.test = make_dataset(std::move(test_X), std::move(test_y), cfg.n_classes);
    } else {
        CsvTable table = load_csv(cfg.train_csv, cfg.has_header);
        Matrix X = normalize_255(table.pixels);
        if (cfg.resize) X = downsample_rows_2x(X, cfg.image_rows, cfg.image_cols);
        if (cfg.test_csv.empty()) {
            Dataset all = make_dataset(std::move(X), std::move(table.labels), cfg.n_classes);
            auto split = train_test_split(all, cfg.n_train, cfg.n_test, /*seed=*/1234);
            return {std::move(split.first), std::move(split.second)};
        }
        bundle.train = make_dataset(std::move(X), std::move(table.labels), cfg.n_classes);
        CsvTable test_table = load_csv(cfg.test_csv, cfg.has_header);
        Matrix test_X = normalize_255(test_table.pixels);
        if (cfg.resize) test_X = downsample_rows_2x(test_X, cfg.image_rows, cfg.image_cols);
        bundle.test = make_dataset(std::move(test_X), std::move(test_table.labels),
                                   cfg.n_classes);
    }
    if (cfg.n_train > 0 && cfg.n_train < bundle.train.size())
        bundle.train = head(bundle.train, cfg.n_train);
    if (cfg.n_test > 0 && cfg.n_test < bundle.test.size())
        bundle.test = head(bundle.test, cfg.n_test);
    return bundle;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& train,
                                const Dataset& test) {
    Rng rng(cfg.seed);
    const ActivationKind out_act = activation_from_string(cfg.output_activation);
    const std::size_t n_classes = train.n_classes();

    // optional validation carve-out for early stopping / curves
    Dataset train_part = train;
    Dataset val_part;
    const Dataset* val = nullptr;
    if (cfg.validation_fraction > 0.0) {
        const auto n_val = std::size_t(std::floor(double(train.size()) *
                                                  cfg.validation_fraction));
        if (n_val > 0) {
            auto split = train_test_split(train, train.size() - n_val, n_val,
                                          cfg.seed + 3);
            train_part = std::move(split.first);
            val_part = std::move(split.second);
            val = &val_part;
        }
    }

    ExperimentResult result;
    NetworkParams net;
    if (cfg.model == "mlp") {
        std::vector<std::size_t> sizes;
        sizes.push_back(train.X.cols());
        sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
        sizes.push_back(n_classes);
        net = init_network(sizes, InitScheme::gaussian(cfg.init_sigma), rng);
        net.hidden_activation = activation_from_string(cfg.hidden_activation);
        net.output_activation = out_act;
    } else if (cfg.model == "disc_pretrain") {
        std::vector<std::size_t> sizes;
        sizes.push_back(train.X.cols());
        sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
        sizes.push_back(n_classes);
        OptimizerConfig stage =
            make_opt(cfg, cfg.learning_rate, cfg.epochs_pretrain, cfg.seed + 1);
        net = discriminative_pretrain(sizes, train_part, val, stage, make_finetune_cfg(cfg),
                                      rng);
        result.net = net;
        result.pre_finetune_test_error = evaluate(net, test);
        result.test_error = result.pre_finetune_test_error;
        result.train_error = evaluate(net, train);
        return result;
    } else {
        auto [layers, report] = pretrain_stack(train_part.X, make_stack_spec(cfg), rng);
        result.pretrain_report = std::move(report);
        net = unroll_to_classifier(layers, train.X.cols(), n_classes, out_act, rng);
    }

    result.pre_finetune_test_error = evaluate(net, test);

    if (cfg.finetune && cfg.epochs_finetune > 0) {
        FinetuneResult fr = finetune(std::move(net), train_part, val, make_finetune_cfg(cfg),
                                     rng);
        net = std::move(fr.net);
        result.finetune_history = std::move(fr.history);
    }

    result.test_error = evaluate(net, test);
    result.train_error = evaluate(net, train);
    result.net = std::move(net);
    return result;
}

double run_gradcheck(const ExperimentConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    constexpr double kEps = 1e-4;

    auto rel_err = [](const std::vector<Matrix>& got, const std::vector<Matrix>& want) {
        double worst = 0.0;
        for (std::size_t p = 0; p < got.size(); ++p) {
            for (std::size_t k = 0; k < got[p].size(); ++k) {
                const double a = got[p].data()[k];
                const double b = want[p].data()[k];
                worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(b)));
            }
        }
        return worst;
    };

    // small random batch in [0, 1]
    const std::size_t m = 5;
    Matrix X(m, 4);
    for (double& v : X.data()) v = rng.uniform();

    if (cfg.model == "sae" || cfg.model == "sdae") {
        // autoencoder path, sparsity penalty included when configured
        NetworkParams net = init_network({4, 3, 4}, InitScheme::gaussian(0.5), rng);
        std::optional<SparsityConfig> sparsity;
        if (cfg.sparsity_weight > 0.0)
            sparsity = SparsityConfig{cfg.sparsity_target, cfg.sparsity_weight};
        Matrix p_hat = mean_hidden_activation(from_network(net), X);
        Gradients grads = sparse_ae_gradient(net, X, X, sparsity, p_hat);

        auto objective = [&](const std::vector<Matrix>& params) {
            NetworkParams probe = net;
            probe.layers[0].weights = params[0];
            probe.layers[0].bias = params[1];
            probe.layers[1].weights = params[2];
            probe.layers[1].bias = params[3];
            return sparse_ae_loss(probe, X, X, sparsity);
        };
        std::vector<Matrix> params = {net.layers[0].weights, net.layers[0].bias,
                                      net.layers[1].weights, net.layers[1].bias};
        return rel_err(flatten(grads), finite_diff_gradient(objective, params, kEps));
    }

    // classifier path
    NetworkParams net = init_network({4, 3, 3}, InitScheme::gaussian(0.5), rng);
    net.hidden_activation = activation_from_string(cfg.hidden_activation);
    net.output_activation = activation_from_string(cfg.output_activation);
    const LossKind loss_kind = loss_from_string(cfg.loss);
    const RegularizerSpec reg{cfg.l2_lambda, cfg.l1_lambda};

    Matrix Y(m, 3);
    for (std::size_t i = 0; i < m; ++i) Y(i, rng.uniform_int(3)) = 1.0;

    Gradients grads = backprop(net, X, Y, loss_kind, reg, std::nullopt, rng);
    auto objective = [&](const std::vector<Matrix>& params) {
        NetworkParams probe = net;
        probe.layers[0].weights = params[0];
        probe.layers[0].bias = params[1];
        probe.layers[1].weights = params[2];
        probe.layers[1].bias = params[3];
        return loss(loss_kind, forward(probe, X).back(), Y, reg, probe);
    };
    std::vector<Matrix> params = {net.layers[0].weights, net.layers[0].bias,
                                  net.layers[1].weights, net.layers[1].bias};
    return rel_err(flatten(grads), finite_diff_gradient(objective, params, kEps));
}

}  // namespace deepnet
