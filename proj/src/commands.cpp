#include "loopsim/commands.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "loopsim/timetags.hpp"
#include "loopsim/validation.hpp"

namespace loopsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open for writing: " + path.string());
    file << content;
    if (!file) throw IoError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_header(const RunConfig& cfg) { return "# config_hash=" + cfg.hash() + "\n"; }

json distribution_json(const RunConfig& cfg, const PhotonDistribution& dist) {
    json j;
    j["config_hash"] = cfg.hash();
    j["m"] = dist.modes;
    j["n"] = dist.photons;
    j["subspace"] = to_string(dist.subspace);
    j["model"] = to_string(dist.model);
    j["pre_normalization_mass"] = dist.pre_normalization_mass;
    json support = json::array();
    for (const Pattern& p : dist.support) support.push_back(pattern_string(p));
    j["support"] = support;
    j["probabilities"] = dist.probabilities;
    return j;
}

std::string distribution_csv(const RunConfig& cfg, const PhotonDistribution& dist) {
    std::ostringstream out;
    out << csv_header(cfg) << "pattern,probability\n";
    for (size_t i = 0; i < dist.support.size(); ++i) {
        out << pattern_string(dist.support[i]) << ',' << fmt(dist.probabilities[i]) << '\n';
    }
    return out.str();
}

// theory distribution in the configured model over the collision-free
// subspace (the measurable support of the single-detector pipeline)
PhotonDistribution configured_distribution(const RunConfig& cfg) {
    const ModeMatrix matrix = compile_network(cfg.experiment.schedule);
    const PhotonModel model = model_from_string(cfg.simulation.model);
    const int threads = cfg.simulation.threads;
    if (model == PhotonModel::mixture) {
        const auto ind = output_distribution(matrix, cfg.experiment.input,
                                             Subspace::collision_free,
                                             PhotonModel::indistinguishable, threads);
        const auto dis = output_distribution(matrix, cfg.experiment.input,
                                             Subspace::collision_free,
                                             PhotonModel::distinguishable, threads);
        return mix_distinguishability(ind, dis, cfg.source.indistinguishability);
    }
    return output_distribution(matrix, cfg.experiment.input, Subspace::collision_free, model,
                               threads);
}

std::string frequencies_csv(const RunConfig& cfg, const PhotonDistribution& theory,
                            const std::map<Pattern, uint64_t>& counts) {
    uint64_t total = 0;
    for (const auto& [pattern, count] : counts) total += count;
    std::ostringstream out;
    out << csv_header(cfg) << "pattern,count,frequency\n";
    for (const Pattern& p : theory.support) {
        const auto it = counts.find(p);
        const uint64_t c = (it == counts.end()) ? 0 : it->second;
        const double freq = total > 0 ? static_cast<double>(c) / static_cast<double>(total) : 0.0;
        out << pattern_string(p) << ',' << c << ',' << fmt(freq) << '\n';
    }
    return out.str();
}

std::string events_csv(const RunConfig& cfg, const std::vector<SequenceRecord>& records,
                       int photons, int modes) {
    std::ostringstream out;
    out << csv_header(cfg) << "frame_index,pattern\n";
    for (const SequenceRecord& r : records) {
        if (static_cast<int>(r.occupied_bins.size()) != photons) continue;
        Pattern p(modes, 0);
        for (int bin : r.occupied_bins) p[bin - 1] = 1;
        out << r.frame_index << ',' << pattern_string(p) << '\n';
    }
    return out.str();
}

json stream_report_json(const RunConfig& cfg, const TagStream& stream,
                        const std::vector<SequenceRecord>& records) {
    uint64_t stray = 0, duplicates = 0;
    json census = json::object();
    std::map<int, uint64_t> by_cardinality;
    for (const SequenceRecord& r : records) {
        stray += r.stray_count;
        duplicates += r.duplicate_count;
        by_cardinality[static_cast<int>(r.occupied_bins.size())] += 1;
    }
    for (const auto& [cardinality, count] : by_cardinality) {
        census[std::to_string(cardinality)] = count;
    }
    json j;
    j["config_hash"] = cfg.hash();
    j["total_tags"] = stream.tags.size();
    j["frames_seen"] = records.size();
    j["stray_count"] = stray;
    j["stray_fraction"] =
        stream.tags.empty() ? 0.0 : static_cast<double>(stray) / stream.tags.size();
    j["duplicate_count"] = duplicates;
    j["frame_census"] = census;
    return j;
}

ValidationReport run_uniform_validation(const RunConfig& cfg,
                                        const std::vector<Pattern>& events) {
    const ModeMatrix matrix = compile_network(cfg.experiment.schedule);
    const double threshold = rne_threshold(matrix, cfg.experiment.input);
    ValidationReport report;
    report.method = "rne_uniform";
    report.counter_trace = rne_counter(events, matrix, cfg.experiment.input, threshold);
    report.statistic = report.counter_trace.empty()
                           ? 0.0
                           : static_cast<double>(report.counter_trace.back());
    report.parameters["events"] = static_cast<double>(events.size());
    report.parameters["threshold"] = threshold;
    report.parameters["seed"] = static_cast<double>(cfg.simulation.seed);
    return report;
}

json report_json(const RunConfig& cfg, const ValidationReport& report) {
    json j;
    j["config_hash"] = cfg.hash();
    j["method"] = report.method;
    j["statistic"] = report.statistic;
    if (report.p_value) j["p_value"] = *report.p_value;
    json params = json::object();
    for (const auto& [key, value] : report.parameters) params[key] = value;
    j["parameters"] = params;
    return j;
}

// Event files come in two layouts, decided by the header line:
//   frame_index,pattern    one event per row, ordered
//   pattern,count[,...]    aggregated counts
// Headerless files must list one pattern per line.
enum class EventLayout { ordered, aggregated, bare };

std::vector<std::pair<Pattern, uint64_t>> parse_events_file(const std::string& path,
                                                            int modes) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open events file: " + path);
    EventLayout layout = EventLayout::bare;
    std::vector<std::pair<Pattern, uint64_t>> rows;
    std::string line;
    bool saw_header = false;
    while (std::getline(file, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header && line.rfind("frame_index", 0) == 0) {
            layout = EventLayout::ordered;
            saw_header = true;
            continue;
        }
        if (!saw_header && line.rfind("pattern", 0) == 0) {
            layout = EventLayout::aggregated;
            saw_header = true;
            continue;
        }
        saw_header = true;
        std::string pattern_text = line;
        uint64_t count = 1;
        const auto comma = line.find(',');
        if (layout == EventLayout::ordered) {
            if (comma == std::string::npos) {
                throw std::invalid_argument("events file: expected frame_index,pattern");
            }
            pattern_text = line.substr(comma + 1);
            const auto extra = pattern_text.find(',');
            if (extra != std::string::npos) pattern_text = pattern_text.substr(0, extra);
        } else if (comma != std::string::npos) {
            pattern_text = line.substr(0, comma);
            if (layout == EventLayout::aggregated) {
                std::string rest = line.substr(comma + 1);
                const auto extra = rest.find(',');
                if (extra != std::string::npos) rest = rest.substr(0, extra);
                count = std::stoull(rest);
            }
        }
        const Pattern p = pattern_from_string(pattern_text);
        if (static_cast<int>(p.size()) != modes) {
            throw std::invalid_argument("events file: pattern length does not match m");
        }
        rows.emplace_back(std::move(p), count);
    }
    return rows;
}

std::map<Pattern, uint64_t> counts_from_events_file(const std::string& path, int modes) {
    std::map<Pattern, uint64_t> counts;
    for (const auto& [pattern, count] : parse_events_file(path, modes)) {
        counts[pattern] += count;
    }
    return counts;
}

std::vector<Pattern> sequence_from_events_file(const std::string& path, int modes) {
    std::vector<Pattern> events;
    for (const auto& [pattern, count] : parse_events_file(path, modes)) {
        for (uint64_t c = 0; c < count; ++c) events.push_back(pattern);
    }
    return events;
}

PhotonDistribution distribution_from_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open distribution file: " + path);
    PhotonDistribution dist;
    std::string line;
    double total = 0.0;
    while (std::getline(file, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("pattern", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("distribution file: expected pattern,value");
        }
        const Pattern p = pattern_from_string(line.substr(0, comma));
        std::string rest = line.substr(comma + 1);
        // frequencies files carry pattern,count,frequency: use the last column
        const auto last_comma = rest.rfind(',');
        if (last_comma != std::string::npos) rest = rest.substr(last_comma + 1);
        dist.support.push_back(p);
        dist.probabilities.push_back(std::stod(rest));
        total += dist.probabilities.back();
    }
    if (dist.support.empty()) throw std::invalid_argument("distribution file is empty");
    dist.modes = static_cast<int>(dist.support[0].size());
    dist.photons = pattern_total(dist.support[0]);
    if (total > 0.0) {
        for (double& p : dist.probabilities) p /= total;
    }
    return dist;
}

}  // namespace

void cmd_compile(const RunConfig& cfg, const std::string& out_dir) {
    const ModeMatrix matrix = compile_network(cfg.experiment.schedule);
    json j;
    j["config_hash"] = cfg.hash();
    j["dim"] = cfg.experiment.schedule.m;
    json entries = json::array();
    for (int row = 0; row < matrix.rows(); ++row) {
        for (int col = 0; col < matrix.cols(); ++col) {
            entries.push_back({matrix(row, col).real(), matrix(row, col).imag()});
        }
    }
    j["entries"] = entries;
    write_json(fs::path(out_dir) / "matrix.json", j);
    cmd_preview(cfg, out_dir);
}

void cmd_preview(const RunConfig& cfg, const std::string& out_dir) {
    const std::vector<double> transmitted = preview_intensity(cfg.experiment.schedule);
    std::ostringstream out;
    out << csv_header(cfg) << "event,transmitted_fraction\n";
    for (size_t k = 0; k < transmitted.size(); ++k) {
        out << (k + 1) << ',' << fmt(transmitted[k]) << '\n';
    }
    write_text(fs::path(out_dir) / "preview.csv", out.str());
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    const PhotonDistribution theory = configured_distribution(cfg);
    write_text(fs::path(out_dir) / "distribution.csv", distribution_csv(cfg, theory));
    write_json(fs::path(out_dir) / "distribution.json", distribution_json(cfg, theory));

    const TagStream stream =
        synthesize_stream(theory, cfg.experiment, cfg.simulation.detector_efficiency,
                          cfg.simulation.jitter_sigma_ps, cfg.simulation.n_frames,
                          cfg.simulation.seed);
    fs::create_directories(out_dir);
    write_tag_stream((fs::path(out_dir) / "tags.bin").string(), stream);

    const std::vector<SequenceRecord> records =
        bin_tags(stream, cfg.experiment, cfg.simulation.window_ns, cfg.simulation.t0_ps);
    const int n = pattern_total(cfg.experiment.input);
    const EventCounts events = extract_events(records, n, cfg.experiment.schedule.m);

    write_text(fs::path(out_dir) / "frequencies.csv",
               frequencies_csv(cfg, theory, events.counts));
    write_text(fs::path(out_dir) / "events.csv",
               events_csv(cfg, records, n, cfg.experiment.schedule.m));

    // headline numbers, including rate estimates from the frame duty cycle
    const double duty =
        1.0e9 / (cfg.experiment.sequence_period_ns * cfg.source.repetition_rate_hz);
    const RateEstimate rates =
        estimate_rates(cfg.source, n, theory.pre_normalization_mass, std::min(duty, 1.0));
    json summary;
    summary["config_hash"] = cfg.hash();
    summary["label"] = cfg.experiment.label;
    summary["m"] = cfg.experiment.schedule.m;
    summary["n"] = n;
    summary["model"] = cfg.simulation.model;
    summary["frames"] = cfg.simulation.n_frames;
    summary["collision_free_mass"] = theory.pre_normalization_mass;
    summary["events_extracted"] = events.total();
    summary["duty"] = std::min(duty, 1.0);
    summary["collision_free_rate_hz"] = rates.collision_free_hz;
    summary["total_rate_hz"] = rates.total_hz;
    write_json(fs::path(out_dir) / "summary.json", summary);
}

void cmd_hom(const RunConfig& cfg, const std::string& out_dir) {
    if (cfg.experiment.schedule.m != 2) {
        throw std::invalid_argument("hom: schedule must have m = 2 (one mid reflectivity)");
    }
    const double mid = cfg.experiment.schedule.reflectivities[0];
    const PhotonModel model = model_from_string(cfg.simulation.model);
    const PhotonDistribution bin_state =
        hom_bin_state(mid, model, cfg.source.indistinguishability,
                      cfg.experiment.schedule.loop_transmission);

    const double tau = cfg.experiment.schedule.bin_period_ns;
    const double period = cfg.experiment.sequence_period_ns;
    const CorrelationHistogram hist =
        hom_histogram(bin_state, tau, period, cfg.simulation.n_frames, cfg.simulation.seed,
                      cfg.simulation.histogram_bin_ns, cfg.simulation.peak_window_ns);

    std::ostringstream out;
    out << csv_header(cfg) << "delay_ns,counts\n";
    for (const auto& [key, count] : hist.counts) {
        out << fmt(hist.delay_ns(key)) << ',' << count << '\n';
    }
    write_text(fs::path(out_dir) / "hom_histogram.csv", out.str());

    const double c_plus = static_cast<double>(hist.peak_area(tau));
    const double c_minus = static_cast<double>(hist.peak_area(-tau));
    const double c_zero = static_cast<double>(hist.peak_area(0.0));
    const double c_ref =
        0.5 * (static_cast<double>(hist.peak_area(period)) +
               static_cast<double>(hist.peak_area(-period)));
    json j;
    j["config_hash"] = cfg.hash();
    j["model"] = cfg.simulation.model;
    j["mid_reflectivity"] = mid;
    j["bin_state"] = {{"p20", bin_state.probabilities[0]},
                      {"p11", bin_state.probabilities[1]},
                      {"p02", bin_state.probabilities[2]}};
    j["c_plus"] = c_plus;
    j["c_minus"] = c_minus;
    j["c_zero"] = c_zero;
    j["c_reference"] = c_ref;
    j["visibility"] = visibility(c_plus, c_minus, c_zero);
    write_json(fs::path(out_dir) / "hom.json", j);
}

void cmd_reconstruct(const RunConfig& cfg, const std::string& tags_path,
                     const std::string& out_dir) {
    if (!fs::exists(tags_path)) throw IoError("tags file not found: " + tags_path);
    const TagStream stream = tags_path.ends_with(".csv") ? read_tag_stream_csv(tags_path)
                                                         : read_tag_stream(tags_path);
    const std::vector<SequenceRecord> records =
        bin_tags(stream, cfg.experiment, cfg.simulation.window_ns, cfg.simulation.t0_ps);
    const int n = pattern_total(cfg.experiment.input);
    const EventCounts events = extract_events(records, n, cfg.experiment.schedule.m);

    const PhotonDistribution theory = configured_distribution(cfg);
    write_text(fs::path(out_dir) / "frequencies.csv",
               frequencies_csv(cfg, theory, events.counts));
    write_text(fs::path(out_dir) / "events.csv",
               events_csv(cfg, records, n, cfg.experiment.schedule.m));
    write_json(fs::path(out_dir) / "stream_report.json",
               stream_report_json(cfg, stream, records));
}

void cmd_validate(const RunConfig& cfg, const std::string& events_path,
                  const std::string& mode, const std::string& reference_path,
                  const std::string& out_dir) {
    if (!fs::exists(events_path)) throw IoError("events file not found: " + events_path);
    const int modes = cfg.experiment.schedule.m;

    if (mode == "uniform") {
        const std::vector<Pattern> events = sequence_from_events_file(events_path, modes);
        const ValidationReport report = run_uniform_validation(cfg, events);
        write_json(fs::path(out_dir) / "validation.json", report_json(cfg, report));
        std::ostringstream trace;
        trace << csv_header(cfg) << "event,counter\n";
        for (size_t i = 0; i < report.counter_trace.size(); ++i) {
            trace << (i + 1) << ',' << report.counter_trace[i] << '\n';
        }
        write_text(fs::path(out_dir) / "counter.csv", trace.str());
        return;
    }

    if (mode == "distinguishable") {
        const std::map<Pattern, uint64_t> counts = counts_from_events_file(events_path, modes);
        const ModeMatrix matrix = compile_network(cfg.experiment.schedule);
        const PhotonDistribution bona_fide =
            output_distribution(matrix, cfg.experiment.input, Subspace::collision_free,
                                PhotonModel::indistinguishable, cfg.simulation.threads);
        const ValidationReport report = validate_distinguishable(
            counts, bona_fide, cfg.validation.clusters, cfg.validation.sample_size,
            cfg.validation.repeats, cfg.simulation.seed);
        write_json(fs::path(out_dir) / "validation.json", report_json(cfg, report));
        return;
    }

    if (mode == "fidelity") {
        PhotonDistribution reference;
        if (reference_path.empty()) {
            reference = configured_distribution(cfg);
        } else {
            if (!fs::exists(reference_path)) {
                throw IoError("reference file not found: " + reference_path);
            }
            reference = distribution_from_csv(reference_path);
        }
        PhotonDistribution test = distribution_from_csv(events_path);
        if (test.support != reference.support) {
            // align the test frequencies onto the reference support
            std::map<Pattern, double> lookup;
            for (size_t i = 0; i < test.support.size(); ++i) {
                lookup[test.support[i]] = test.probabilities[i];
            }
            test.support = reference.support;
            test.probabilities.assign(reference.support.size(), 0.0);
            for (size_t i = 0; i < reference.support.size(); ++i) {
                const auto it = lookup.find(reference.support[i]);
                if (it != lookup.end()) test.probabilities[i] = it->second;
            }
        }
        ValidationReport report;
        report.method = "fidelity";
        report.statistic = statistical_fidelity(test, reference);
        report.parameters["support_size"] = static_cast<double>(reference.support.size());
        write_json(fs::path(out_dir) / "validation.json", report_json(cfg, report));
        return;
    }

    throw std::invalid_argument("validate: unknown mode '" + mode + "'");
}

void cmd_fidelity(const std::string& dist_a_path, const std::string& dist_b_path,
                  const std::string& out_path) {
    if (!fs::exists(dist_a_path)) throw IoError("file not found: " + dist_a_path);
    if (!fs::exists(dist_b_path)) throw IoError("file not found: " + dist_b_path);
    const PhotonDistribution a = distribution_from_csv(dist_a_path);
    const PhotonDistribution b = distribution_from_csv(dist_b_path);
    if (a.support != b.support) {
        throw std::invalid_argument("fidelity: the two files list different supports");
    }
    json j;
    j["fidelity"] = statistical_fidelity(a, b);
    j["support_size"] = a.support.size();
    write_json(out_path, j);
}

void cmd_report(const RunConfig& cfg, const std::string& tags_path,
                const std::string& out_dir) {
    if (!fs::exists(tags_path)) throw IoError("tags file not found: " + tags_path);
    const TagStream stream = tags_path.ends_with(".csv") ? read_tag_stream_csv(tags_path)
                                                         : read_tag_stream(tags_path);
    const std::vector<SequenceRecord> records =
        bin_tags(stream, cfg.experiment, cfg.simulation.window_ns, cfg.simulation.t0_ps);
    write_json(fs::path(out_dir) / "stream_report.json",
               stream_report_json(cfg, stream, records));
}

}  // namespace loopsim
