#include "deepnet/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "deepnet/errors.hpp"

namespace deepnet {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json apply_axis(const json& defaults, const std::string& name, const json& value) {
    json cfg = defaults;
    cfg[name] = value;
    return cfg;
}

double json_to_error(const json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

json error_to_json(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

bool TrialResult::operator==(const TrialResult& other) const {
    auto same = [](double a, double b) {
        return (std::isnan(a) && std::isnan(b)) || a == b;
    };
    return parameter_name == other.parameter_name && value == other.value &&
           same(test_error, other.test_error) && same(train_error, other.train_error) &&
           wall_clock_seconds == other.wall_clock_seconds && seed == other.seed &&
           failed == other.failed && error == other.error;
}

SweepSpec parse_sweep_spec(const json& doc) {
    if (!doc.is_object() || !doc.contains("defaults") || !doc.contains("axes"))
        throw ConfigError("sweep config needs 'defaults' and 'axes'");
    SweepSpec spec;
    spec.defaults = doc["defaults"];
    parse_experiment_config(spec.defaults);  // validate up front
    spec.seed = doc.value("seed", std::uint64_t{42});

    for (const json& axis : doc["axes"]) {
        if (!axis.is_object() || !axis.contains("name") || !axis.contains("values"))
            throw ConfigError("each axis needs 'name' and 'values'");
        SweepAxis a;
        a.name = axis["name"].get<std::string>();
        for (const json& v : axis["values"]) a.values.push_back(v);
        if (a.values.empty()) throw ConfigError("axis '" + a.name + "' has no values");
        // substituting the first value must still parse, which also
        // rejects axis names that are not config fields
        parse_experiment_config(apply_axis(spec.defaults, a.name, a.values.front()));
        spec.axes.push_back(std::move(a));
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw FormatError("'" + path + "': invalid JSON: " + e.what());
    }
    return parse_sweep_spec(doc);
}

std::uint64_t trial_seed(std::uint64_t base, const std::string& axis, const json& value) {
    return base + fnv1a(axis + "=" + value.dump());
}

std::vector<TrialResult> run_sweep(const SweepSpec& spec, const DatasetBundle& data,
                                   const std::function<void(const TrialResult&)>& on_trial) {
    std::vector<TrialResult> results;
    for (const SweepAxis& axis : spec.axes) {
        for (const json& value : axis.values) {
            TrialResult trial;
            trial.parameter_name = axis.name;
            trial.value = value;
            trial.seed = trial_seed(spec.seed, axis.name, value);
            const auto started = std::chrono::steady_clock::now();
            try {
                ExperimentConfig cfg =
                    parse_experiment_config(apply_axis(spec.defaults, axis.name, value));
                cfg.seed = trial.seed;
                ExperimentResult r = run_experiment(cfg, data.train, data.test);
                trial.test_error = r.test_error;
                trial.train_error = r.train_error;
            } catch (const std::exception& e) {
                trial.failed = true;
                trial.error = e.what();
            }
            trial.wall_clock_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count();
            if (on_trial) on_trial(trial);
            results.push_back(std::move(trial));
        }
    }
    return results;
}

std::map<std::string, json> select_best(const std::vector<TrialResult>& results) {
    std::map<std::string, json> bests;
    std::map<std::string, double> best_errors;
    std::map<std::string, bool> any_ok;
    for (const TrialResult& t : results) {
        any_ok.try_emplace(t.parameter_name, false);
        if (t.failed) continue;
        auto it = best_errors.find(t.parameter_name);
        if (it == best_errors.end() || t.test_error < it->second) {
            best_errors[t.parameter_name] = t.test_error;
            bests[t.parameter_name] = t.value;
        }
        any_ok[t.parameter_name] = true;
    }
    for (const auto& [axis, ok] : any_ok) {
        if (!ok) throw ParamError("selection failed: every trial of axis '" + axis +
                                  "' failed");
    }
    return bests;
}

ExperimentConfig compose_optimal(const SweepSpec& spec,
                                 const std::map<std::string, json>& bests) {
    json cfg = spec.defaults;
    for (const auto& [name, value] : bests) cfg[name] = value;
    return parse_experiment_config(cfg);
}

void persist_results(const std::vector<TrialResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (const TrialResult& t : results) {
        ordered line;
        line["parameter_name"] = t.parameter_name;
        line["value"] = t.value;
        line["test_error"] = error_to_json(t.test_error);
        line["train_error"] = error_to_json(t.train_error);
        line["wall_clock_seconds"] = t.wall_clock_seconds;
        line["seed"] = t.seed;
        line["failed"] = t.failed;
        line["error"] = t.error;
        out << line.dump() << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<TrialResult> load_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<TrialResult> results;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError("'" + path + "': invalid JSON line: " + e.what());
        }
        TrialResult t;
        t.parameter_name = doc.at("parameter_name").get<std::string>();
        t.value = doc.at("value");
        t.test_error = json_to_error(doc.at("test_error"));
        t.train_error = json_to_error(doc.at("train_error"));
        t.wall_clock_seconds = doc.at("wall_clock_seconds").get<double>();
        t.seed = doc.at("seed").get<std::uint64_t>();
        t.failed = doc.at("failed").get<bool>();
        t.error = doc.at("error").get<std::string>();
        results.push_back(std::move(t));
    }
    return results;
}

void emit_curves(const TrainingHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "epoch,train_loss,val_error\n";
    char buf[128];
    for (const EpochRecord& r : history) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", r.epoch, r.train_loss,
                      r.val_error);
        out << buf;
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace deepnet
