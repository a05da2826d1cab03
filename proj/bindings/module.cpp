#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "deepnet/errors.hpp"
#include "deepnet/harness.hpp"
#include "deepnet/model_io.hpp"

namespace py = pybind11;
using namespace deepnet;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw ShapeError("expected a 2-D array");
    Matrix m(std::size_t(arr.shape(0)), std::size_t(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), m.data().begin());
    return m;
}

py::array_t<double> matrix_to_numpy(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), arr.mutable_data());
    return arr;
}

nlohmann::json json_from_pyobject(const py::object& obj) {
    py::module_ json_mod = py::module_::import("json");
    const std::string dumped = py::cast<std::string>(json_mod.attr("dumps")(obj));
    return nlohmann::json::parse(dumped);
}

ExperimentConfig config_from_dict(const py::dict& d) {
    return parse_experiment_config(json_from_pyobject(d));
}

MatmulAlgo algo_from_string(const std::string& s) {
    if (s == "naive") return MatmulAlgo::naive;
    if (s == "strassen") return MatmulAlgo::strassen;
    if (s == "auto") return MatmulAlgo::auto_select;
    throw ParamError("unknown matmul algorithm '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deep pre-training toolkit: feed-forward networks, RBMs, "
              "autoencoders and greedy layer-wise stacks.";

    py::register_exception<ShapeError>(m, "ShapeError");
    py::register_exception<ParamError>(m, "ParamError");
    py::register_exception<FormatError>(m, "FormatError");
    py::register_exception<CapacityError>(m, "CapacityError");
    py::register_exception<NumericError>(m, "NumericError");

    // dense kernels
    m.def(
        "matmul",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& b,
           const std::string& algo) {
            return matrix_to_numpy(
                matmul(matrix_from_numpy(a), matrix_from_numpy(b), algo_from_string(algo)));
        },
        py::arg("a"), py::arg("b"), py::arg("algo") = "auto",
        "Matrix product; algo is 'naive', 'strassen' or 'auto'.");
    m.def("col_means", [](const py::array_t<double>& a) {
        return matrix_to_numpy(col_means(matrix_from_numpy(a)));
    });
    m.def(
        "activate",
        [](const std::string& kind, const py::array_t<double>& z) {
            return matrix_to_numpy(activate(activation_from_string(kind),
                                            matrix_from_numpy(z)));
        },
        py::arg("kind"), py::arg("z"));
    m.def("kl_divergence", &kl_divergence, py::arg("p"), py::arg("q"));

    // RBM surface
    py::class_<RbmParams>(m, "Rbm")
        .def_property_readonly("n_visible", &RbmParams::n_visible)
        .def_property_readonly("n_hidden", &RbmParams::n_hidden)
        .def_property_readonly("W", [](const RbmParams& r) { return matrix_to_numpy(r.W); })
        .def_property_readonly("visible_bias",
                               [](const RbmParams& r) { return matrix_to_numpy(r.a); })
        .def_property_readonly("hidden_bias",
                               [](const RbmParams& r) { return matrix_to_numpy(r.b); });
    m.def(
        "init_rbm",
        [](std::size_t n_visible, std::size_t n_hidden, const py::array_t<double>& data,
           std::uint64_t seed) {
            Rng rng(seed);
            return init_rbm(n_visible, n_hidden, matrix_from_numpy(data), rng);
        },
        py::arg("n_visible"), py::arg("n_hidden"), py::arg("data"), py::arg("seed") = 0);
    m.def(
        "train_rbm",
        [](RbmParams& rbm, const py::array_t<double>& X, std::size_t epochs,
           double learning_rate, std::size_t batch_size, std::size_t k, double momentum,
           double weight_decay, std::uint64_t seed) {
            CdConfig cfg;
            cfg.epochs = epochs;
            cfg.learning_rate = learning_rate;
            cfg.batch_size = batch_size;
            cfg.k = k;
            cfg.momentum = momentum;
            cfg.weight_decay = weight_decay;
            Rng rng(seed);
            return train_rbm(rbm, matrix_from_numpy(X), cfg, rng);
        },
        py::arg("rbm"), py::arg("X"), py::arg("epochs") = 10, py::arg("learning_rate") = 0.1,
        py::arg("batch_size") = 100, py::arg("k") = 1, py::arg("momentum") = 0.0,
        py::arg("weight_decay") = 0.0, py::arg("seed") = 0,
        "Contrastive-divergence epochs; returns the per-epoch reconstruction error.");
    m.def("hidden_probs", [](const RbmParams& rbm, const py::array_t<double>& v) {
        return matrix_to_numpy(hidden_probs(rbm, matrix_from_numpy(v)));
    });
    m.def("visible_probs", [](const RbmParams& rbm, const py::array_t<double>& h) {
        return matrix_to_numpy(visible_probs(rbm, matrix_from_numpy(h)));
    });
    m.def("exact_partition", &exact_partition);
    m.def("exact_loglik", [](const RbmParams& rbm, const py::array_t<double>& data) {
        return exact_loglik(rbm, matrix_from_numpy(data));
    });

    // classifier surface
    py::class_<NetworkParams>(m, "Network")
        .def_property_readonly("layer_sizes", &NetworkParams::layer_sizes)
        .def("predict",
             [](const NetworkParams& net, const py::array_t<double>& X) {
                 return predict(net, matrix_from_numpy(X));
             })
        .def("output",
             [](const NetworkParams& net, const py::array_t<double>& X) {
                 return matrix_to_numpy(forward(net, matrix_from_numpy(X)).back());
             });

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("test_error", &ExperimentResult::test_error)
        .def_readonly("train_error", &ExperimentResult::train_error)
        .def_readonly("pre_finetune_test_error",
                      &ExperimentResult::pre_finetune_test_error)
        .def_property_readonly("network",
                               [](const ExperimentResult& r) { return r.net; })
        .def_property_readonly("finetune_curve", [](const ExperimentResult& r) {
            std::vector<double> losses;
            for (const auto& rec : r.finetune_history) losses.push_back(rec.train_loss);
            return losses;
        });

    m.def(
        "run_experiment",
        [](const py::dict& config, const py::array_t<double>& train_X,
           const std::vector<int>& train_y, const py::array_t<double>& test_X,
           const std::vector<int>& test_y, std::size_t n_classes) {
            ExperimentConfig cfg = config_from_dict(config);
            Dataset train = make_dataset(matrix_from_numpy(train_X), train_y, n_classes);
            Dataset test = make_dataset(matrix_from_numpy(test_X), test_y, n_classes);
            return run_experiment(cfg, train, test);
        },
        py::arg("config"), py::arg("train_X"), py::arg("train_y"), py::arg("test_X"),
        py::arg("test_y"), py::arg("n_classes") = 10,
        "Run one configured experiment on in-memory data. The config dict "
        "uses the same schema as the CLI's JSON config; the data section "
        "may be omitted.");
    m.def(
        "train_from_config",
        [](const std::string& config_path) {
            ExperimentConfig cfg = load_experiment_config(config_path);
            DatasetBundle data = load_data(cfg.data);
            return run_experiment(cfg, data.train, data.test);
        },
        py::arg("config_path"));
    m.def(
        "gradcheck",
        [](const py::dict& config, std::uint64_t seed) {
            return run_gradcheck(config_from_dict(config), seed);
        },
        py::arg("config"), py::arg("seed") = 0,
        "Worst relative error of backpropagation vs. finite differences.");

    // persistence
    m.def("save_model",
          [](const NetworkParams& net, const std::string& kind, const std::string& path) {
              save_model({1, kind, net}, path);
          });
    m.def("load_model", [](const std::string& path) {
        SavedModel model = load_model(path);
        return py::make_tuple(model.model_kind, model.net);
    });

    // data plumbing
    m.def("load_idx_images", [](const std::string& path) {
        IdxImages img = load_idx_images(path);
        return matrix_to_numpy(img.to_matrix());
    });
    m.def("load_idx_labels", &load_idx_labels);
    m.def("load_csv", [](const std::string& path, bool has_header) {
        CsvTable t = load_csv(path, has_header);
        return py::make_tuple(t.labels, matrix_to_numpy(t.pixels));
    });
    m.def("downsample_2x", [](const py::array_t<double>& image) {
        return matrix_to_numpy(bilinear_downsample_2x(matrix_from_numpy(image)));
    });

    m.attr("__version__") = "1.0.0";
}
