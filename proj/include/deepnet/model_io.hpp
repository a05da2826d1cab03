#pragma once

#include <string>

#include "deepnet/network.hpp"

namespace deepnet {

struct SavedModel {
    int format_version = 1;
    std::string model_kind;  // dbn | sae | sdae | mlp | disc_pretrain
    NetworkParams net;
};

/// JSON model file: format_version, model_kind, layer_sizes, activations
/// and per-layer weight/bias arrays. Numbers round-trip bit-exactly.
void save_model(const SavedModel& model, const std::string& path);
SavedModel load_model(const std::string& path);

}  // namespace deepnet
