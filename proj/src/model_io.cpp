#include "deepnet/model_io.hpp"

#include <fstream>

#include <json.hpp>

#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

using json = nlohmann::ordered_json;

json matrix_rows(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_rows(const json& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows[0].size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw FormatError("model file: ragged weight rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

}  // namespace

void save_model(const SavedModel& model, const std::string& path) {
    json doc;
    doc["format_version"] = model.format_version;
    doc["model_kind"] = model.model_kind;
    doc["layer_sizes"] = model.net.layer_sizes();
    doc["activations"] = {{"hidden", to_string(model.net.hidden_activation)},
                          {"output", to_string(model.net.output_activation)}};
    json layers = json::array();
    for (const LayerParams& l : model.net.layers) {
        json layer;
        layer["weights"] = matrix_rows(l.weights);
        json bias = json::array();
        for (std::size_t j = 0; j < l.bias.cols(); ++j) bias.push_back(l.bias(0, j));
        layer["bias"] = std::move(bias);
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);

    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << doc.dump(1) << "\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': invalid JSON: " + e.what());
    }
    try {
        SavedModel model;
        model.format_version = doc.at("format_version").get<int>();
        if (model.format_version != 1) {
            throw FormatError("'" + path + "': unsupported format_version " +
                              std::to_string(model.format_version) + ", expected 1");
        }
        model.model_kind = doc.at("model_kind").get<std::string>();
        model.net.hidden_activation =
            activation_from_string(doc.at("activations").at("hidden").get<std::string>());
        model.net.output_activation =
            activation_from_string(doc.at("activations").at("output").get<std::string>());
        for (const json& layer : doc.at("layers")) {
            LayerParams lp;
            lp.weights = matrix_from_rows(layer.at("weights"));
            const json& bias = layer.at("bias");
            lp.bias = Matrix(1, bias.size());
            for (std::size_t j = 0; j < bias.size(); ++j)
                lp.bias(0, j) = bias[j].get<double>();
            if (lp.bias.cols() != lp.weights.rows())
                throw FormatError("'" + path + "': bias/weight shape mismatch");
            model.net.layers.push_back(std::move(lp));
        }
        if (model.net.layers.empty()) throw FormatError("'" + path + "': no layers");

        const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
        if (sizes != model.net.layer_sizes())
            throw FormatError("'" + path + "': layer_sizes do not match stored weights");
        return model;
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

}  // namespace deepnet
