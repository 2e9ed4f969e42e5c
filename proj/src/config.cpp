#include "loopsim/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "loopsim/rng.hpp"

namespace loopsim {

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(path + key, "missing required field");
    }
    return j.at(key);
}

template <typename T>
T get_as(const json& j, const std::string& path) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path, "wrong type");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, const std::string& path, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get_as<T>(j.at(key), path + key);
}

Pattern parse_input(const json& experiment, int modes, const std::string& path) {
    if (experiment.contains("input")) {
        const json& in = experiment.at("input");
        if (in.is_string()) return pattern_from_string(in.get<std::string>());
        return get_as<Pattern>(in, path + "input");
    }
    if (experiment.contains("input_bins")) {
        const auto bins = get_as<std::vector<int>>(experiment.at("input_bins"),
                                                   path + "input_bins");
        return pattern_from_bins(modes, bins);
    }
    throw ConfigError(path + "input", "missing required field (input or input_bins)");
}

}  // namespace

RunConfig config_from_json(const json& j) {
    RunConfig cfg;

    const json& experiment = require(j, "experiment", "");
    const json& schedule = require(experiment, "schedule", "experiment.");
    const std::string sched_path = "experiment.schedule.";
    cfg.experiment.schedule.m = get_as<int>(require(schedule, "m", sched_path), sched_path + "m");
    cfg.experiment.schedule.reflectivities = get_as<std::vector<double>>(
        require(schedule, "reflectivities", sched_path), sched_path + "reflectivities");
    cfg.experiment.schedule.bin_period_ns =
        get_or(schedule, "bin_period_ns", sched_path, 100.0);
    cfg.experiment.schedule.loop_transmission =
        get_or(schedule, "loop_transmission", sched_path, 1.0);
    try {
        cfg.experiment.schedule.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(sched_path + "reflectivities", e.what());
    }

    cfg.experiment.input = parse_input(experiment, cfg.experiment.schedule.m, "experiment.");
    cfg.experiment.sequence_period_ns =
        get_or(experiment, "sequence_period_ns", "experiment.",
               2.0 * cfg.experiment.schedule.m * cfg.experiment.schedule.bin_period_ns);
    cfg.experiment.label = get_or<std::string>(experiment, "label", "experiment.", "run");
    try {
        cfg.experiment.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("experiment", e.what());
    }

    if (j.contains("source")) {
        const json& source = j.at("source");
        cfg.source.indistinguishability =
            get_or(source, "indistinguishability", "source.", 1.0);
        cfg.source.purity_complement = get_or(source, "purity_complement", "source.", 0.0);
        cfg.source.repetition_rate_hz = get_or(source, "repetition_rate_hz", "source.", 80e6);
        cfg.source.end_to_end_efficiency =
            get_or(source, "end_to_end_efficiency", "source.", 1.0);
        try {
            cfg.source.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("source", e.what());
        }
    }

    if (j.contains("simulation")) {
        const json& sim = j.at("simulation");
        cfg.simulation.n_frames = get_or(sim, "n_frames", "simulation.", 10000);
        if (!sim.contains("seed")) {
            throw ConfigError("simulation.seed", "missing required field (no entropy defaults)");
        }
        cfg.simulation.seed = get_as<uint64_t>(sim.at("seed"), "simulation.seed");
        cfg.simulation.detector_efficiency =
            get_or(sim, "detector_efficiency", "simulation.", 1.0);
        cfg.simulation.jitter_sigma_ps = get_or(sim, "jitter_sigma_ps", "simulation.", 0.0);
        cfg.simulation.window_ns = get_or(sim, "window_ns", "simulation.", 3.0);
        cfg.simulation.t0_ps = get_or<int64_t>(sim, "t0_ps", "simulation.", 0);
        cfg.simulation.model =
            get_or<std::string>(sim, "model", "simulation.", "indistinguishable");
        cfg.simulation.threads = get_or(sim, "threads", "simulation.", 1);
        cfg.simulation.histogram_bin_ns = get_or(sim, "histogram_bin_ns", "simulation.", 1.0);
        cfg.simulation.peak_window_ns = get_or(sim, "peak_window_ns", "simulation.", 3.0);
        try {
            model_from_string(cfg.simulation.model);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("simulation.model", e.what());
        }
        if (cfg.simulation.n_frames < 1) {
            throw ConfigError("simulation.n_frames", "must be >= 1");
        }
    } else {
        throw ConfigError("simulation.seed", "missing required field (no entropy defaults)");
    }

    if (j.contains("validation")) {
        const json& val = j.at("validation");
        cfg.validation.clusters = get_or(val, "K", "validation.", cfg.validation.clusters);
        cfg.validation.sample_size =
            get_or(val, "sample_size", "validation.", cfg.validation.sample_size);
        cfg.validation.repeats = get_or(val, "repeats", "validation.", cfg.validation.repeats);
        if (cfg.validation.clusters < 2) throw ConfigError("validation.K", "must be >= 2");
        if (cfg.validation.sample_size < 1) {
            throw ConfigError("validation.sample_size", "must be >= 1");
        }
        if (cfg.validation.repeats < 1) throw ConfigError("validation.repeats", "must be >= 1");
    }

    cfg.output_dir = get_or<std::string>(j, "output_dir", "", "out");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        file >> j;
    } catch (const json::exception& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    json j;
    j["experiment"]["label"] = experiment.label;
    j["experiment"]["schedule"]["m"] = experiment.schedule.m;
    j["experiment"]["schedule"]["reflectivities"] = experiment.schedule.reflectivities;
    j["experiment"]["schedule"]["bin_period_ns"] = experiment.schedule.bin_period_ns;
    j["experiment"]["schedule"]["loop_transmission"] = experiment.schedule.loop_transmission;
    j["experiment"]["input"] = experiment.input;
    j["experiment"]["sequence_period_ns"] = experiment.sequence_period_ns;
    j["source"]["indistinguishability"] = source.indistinguishability;
    j["source"]["purity_complement"] = source.purity_complement;
    j["source"]["repetition_rate_hz"] = source.repetition_rate_hz;
    j["source"]["end_to_end_efficiency"] = source.end_to_end_efficiency;
    j["simulation"]["n_frames"] = simulation.n_frames;
    j["simulation"]["seed"] = simulation.seed;
    j["simulation"]["detector_efficiency"] = simulation.detector_efficiency;
    j["simulation"]["jitter_sigma_ps"] = simulation.jitter_sigma_ps;
    j["simulation"]["window_ns"] = simulation.window_ns;
    j["simulation"]["t0_ps"] = simulation.t0_ps;
    j["simulation"]["model"] = simulation.model;
    j["simulation"]["threads"] = simulation.threads;
    j["simulation"]["histogram_bin_ns"] = simulation.histogram_bin_ns;
    j["simulation"]["peak_window_ns"] = simulation.peak_window_ns;
    j["validation"]["K"] = validation.clusters;
    j["validation"]["sample_size"] = validation.sample_size;
    j["validation"]["repeats"] = validation.repeats;
    j["output_dir"] = output_dir;
    return j;
}

std::string RunConfig::hash() const {
    // the hash identifies the produced data, so the output location is
    // excluded from the canonical form
    json canonical_json = to_json();
    canonical_json.erase("output_dir");
    const std::string canonical = canonical_json.dump();
    const uint64_t h = rng::fnv1a(canonical);
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
    return buffer;
}

}  // namespace loopsim
