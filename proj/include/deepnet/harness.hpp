#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepnet/experiment.hpp"
#include "deepnet/optim.hpp"

namespace deepnet {

/// One model-selection axis: candidate values substituted into the
/// defaults one at a time (axes are swept independently, not crossed).
struct SweepAxis {
    std::string name;
    std::vector<nlohmann::json> values;
};

struct SweepSpec {
    nlohmann::json defaults;  // full experiment config
    std::vector<SweepAxis> axes;
    std::uint64_t seed = 42;
};

SweepSpec parse_sweep_spec(const nlohmann::json& doc);
SweepSpec load_sweep_spec(const std::string& path);

struct TrialResult {
    std::string parameter_name;
    nlohmann::json value;
    double test_error = std::numeric_limits<double>::quiet_NaN();
    double train_error = std::numeric_limits<double>::quiet_NaN();
    double wall_clock_seconds = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;

    bool operator==(const TrialResult& other) const;
};

/// Derives each trial's seed from the sweep seed and a stable hash of
/// (axis, value), so any trial reproduces in isolation.
std::uint64_t trial_seed(std::uint64_t base, const std::string& axis,
                         const nlohmann::json& value);

/// Runs every axis value against the defaults (one full pretrain +
/// finetune + evaluate cycle each). Failing trials are recorded and the
/// sweep continues. Results are ordered by (axis, value) as declared.
std::vector<TrialResult> run_sweep(
    const SweepSpec& spec, const DatasetBundle& data,
    const std::function<void(const TrialResult&)>& on_trial = {});

/// Lowest test error per axis, first value winning ties. Throws if every
/// trial of an axis failed.
std::map<std::string, nlohmann::json> select_best(const std::vector<TrialResult>& results);

/// Defaults overridden by every per-axis best value.
ExperimentConfig compose_optimal(const SweepSpec& spec,
                                 const std::map<std::string, nlohmann::json>& bests);

/// One JSON object per line, stable key order.
void persist_results(const std::vector<TrialResult>& results, const std::string& path);
std::vector<TrialResult> load_results(const std::string& path);

/// CSV `epoch,train_loss,val_error`, 6-decimal fixed formatting.
void emit_curves(const TrainingHistory& history, const std::string& path);

}  // namespace deepnet
