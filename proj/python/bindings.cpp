#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loopsim/commands.hpp"
#include "loopsim/timetags.hpp"
#include "loopsim/validation.hpp"

namespace py = pybind11;
using namespace loopsim;

namespace {

py::dict counts_to_dict(const std::map<Pattern, uint64_t>& counts) {
    py::dict out;
    for (const auto& [pattern, count] : counts) {
        out[py::tuple(py::cast(pattern))] = count;
    }
    return out;
}

std::map<Pattern, uint64_t> counts_from_dict(const py::dict& d) {
    std::map<Pattern, uint64_t> out;
    for (const auto& item : d) {
        out[item.first.cast<Pattern>()] = item.second.cast<uint64_t>();
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "time-bin loop interferometer simulator: compiled core";

    py::register_exception<ConfigError>(m, "ConfigErrorCpp", PyExc_ValueError);

    // network
    py::class_<ReflectivitySchedule>(m, "ReflectivitySchedule")
        .def(py::init<>())
        .def(py::init([](int m_, std::vector<double> r, double tau, double eta) {
                 ReflectivitySchedule s{m_, std::move(r), tau, eta};
                 s.validate();
                 return s;
             }),
             py::arg("m"), py::arg("reflectivities"), py::arg("bin_period_ns") = 100.0,
             py::arg("loop_transmission") = 1.0)
        .def_readwrite("m", &ReflectivitySchedule::m)
        .def_readwrite("reflectivities", &ReflectivitySchedule::reflectivities)
        .def_readwrite("bin_period_ns", &ReflectivitySchedule::bin_period_ns)
        .def_readwrite("loop_transmission", &ReflectivitySchedule::loop_transmission)
        .def("validate", &ReflectivitySchedule::validate);

    m.def("beamsplitter_block", &beamsplitter_block, py::arg("reflectivity"));
    m.def("compile_network", &compile_network, py::arg("schedule"),
          "m x m transfer matrix; entry (j, i) maps input bin i to output bin j");
    m.def("preview_intensity", &preview_intensity, py::arg("schedule"));
    m.def("staircase_reflectivities", &staircase_reflectivities, py::arg("modes"));

    // fock
    m.def("permanent",
          [](const Eigen::MatrixXcd& a) { return permanent(a); }, py::arg("matrix"),
          "matrix permanent (Ryser, Gray-code subsets)");
    m.def("collision_free_outcomes", &collision_free_outcomes, py::arg("modes"),
          py::arg("photons"));
    m.def("full_outcomes", &full_outcomes, py::arg("modes"), py::arg("photons"));
    m.def("outcome_probability", &outcome_probability, py::arg("matrix"), py::arg("input"),
          py::arg("output"));
    m.def("outcome_probability_distinguishable", &outcome_probability_distinguishable,
          py::arg("matrix"), py::arg("input"), py::arg("output"));

    py::enum_<Subspace>(m, "Subspace")
        .value("full", Subspace::full)
        .value("collision_free", Subspace::collision_free);
    py::enum_<PhotonModel>(m, "PhotonModel")
        .value("indistinguishable", PhotonModel::indistinguishable)
        .value("distinguishable", PhotonModel::distinguishable)
        .value("mixture", PhotonModel::mixture);

    py::class_<PhotonDistribution>(m, "PhotonDistribution")
        .def_readonly("support", &PhotonDistribution::support)
        .def_readonly("probabilities", &PhotonDistribution::probabilities)
        .def_readonly("subspace", &PhotonDistribution::subspace)
        .def_readonly("model", &PhotonDistribution::model)
        .def_readonly("modes", &PhotonDistribution::modes)
        .def_readonly("photons", &PhotonDistribution::photons)
        .def_readonly("pre_normalization_mass", &PhotonDistribution::pre_normalization_mass)
        .def("validate", &PhotonDistribution::validate)
        .def("__len__", [](const PhotonDistribution& d) { return d.support.size(); });

    m.def("output_distribution", &output_distribution, py::arg("matrix"), py::arg("input"),
          py::arg("subspace"), py::arg("model"), py::arg("threads") = 1);
    m.def("sample_patterns", &sample_patterns, py::arg("distribution"), py::arg("count"),
          py::arg("seed"));

    // imperfection
    py::class_<SourceModel>(m, "SourceModel")
        .def(py::init<>())
        .def(py::init([](double ind, double g2, double rep, double eff) {
                 SourceModel s{ind, g2, rep, eff};
                 s.validate();
                 return s;
             }),
             py::arg("indistinguishability") = 1.0, py::arg("purity_complement") = 0.0,
             py::arg("repetition_rate_hz") = 80e6, py::arg("end_to_end_efficiency") = 1.0)
        .def_readwrite("indistinguishability", &SourceModel::indistinguishability)
        .def_readwrite("purity_complement", &SourceModel::purity_complement)
        .def_readwrite("repetition_rate_hz", &SourceModel::repetition_rate_hz)
        .def_readwrite("end_to_end_efficiency", &SourceModel::end_to_end_efficiency);

    m.def("mix_distinguishability", &mix_distinguishability, py::arg("indistinguishable"),
          py::arg("distinguishable"), py::arg("weight"));
    m.def(
        "estimate_rates",
        [](const SourceModel& model, int photons, double mass, double duty) {
            const RateEstimate est = estimate_rates(model, photons, mass, duty);
            return py::make_tuple(est.collision_free_hz, est.total_hz);
        },
        py::arg("model"), py::arg("photons"), py::arg("collision_free_mass"), py::arg("duty"),
        "returns (collision_free_hz, total_hz)");

    // protocol
    py::enum_<Parity>(m, "Parity").value("odd", Parity::odd).value("even", Parity::even);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("schedule", &ExperimentSpec::schedule)
        .def_readwrite("input", &ExperimentSpec::input)
        .def_readwrite("sequence_period_ns", &ExperimentSpec::sequence_period_ns)
        .def_readwrite("label", &ExperimentSpec::label)
        .def("validate", &ExperimentSpec::validate);

    m.def("standard_experiment",
          py::overload_cast<int, Parity>(&standard_experiment), py::arg("photons"),
          py::arg("parity"));
    m.def("standard_experiment",
          py::overload_cast<int, Parity, const std::vector<double>&>(&standard_experiment),
          py::arg("photons"), py::arg("parity"), py::arg("reflectivities"));

    py::class_<CorrelationHistogram>(m, "CorrelationHistogram")
        .def_readonly("bin_width_ns", &CorrelationHistogram::bin_width_ns)
        .def_readonly("window_ns", &CorrelationHistogram::window_ns)
        .def_readonly("counts", &CorrelationHistogram::counts)
        .def("peak_area", &CorrelationHistogram::peak_area, py::arg("center_ns"))
        .def("delay_ns", &CorrelationHistogram::delay_ns, py::arg("key"));

    m.def("hom_bin_state", &hom_bin_state, py::arg("mid_reflectivity"), py::arg("model"),
          py::arg("mix_weight") = 1.0, py::arg("loop_transmission") = 1.0);
    m.def("hom_histogram", &hom_histogram, py::arg("bin_state"), py::arg("tau_ns"),
          py::arg("frame_period_ns"), py::arg("frames"), py::arg("seed"),
          py::arg("bin_width_ns") = 1.0, py::arg("window_ns") = 3.0);
    m.def("visibility", &visibility, py::arg("c_plus"), py::arg("c_minus"), py::arg("c_zero"));

    // timetags
    py::class_<TimeTag>(m, "TimeTag")
        .def(py::init([](int64_t ts, uint8_t ch) { return TimeTag{ts, ch}; }),
             py::arg("timestamp_ps"), py::arg("channel") = 0)
        .def_readwrite("timestamp_ps", &TimeTag::timestamp_ps)
        .def_readwrite("channel", &TimeTag::channel);

    py::enum_<StreamOrigin>(m, "StreamOrigin")
        .value("synthetic", StreamOrigin::synthetic)
        .value("file", StreamOrigin::file);

    py::class_<TagStream>(m, "TagStream")
        .def(py::init<>())
        .def_readwrite("tags", &TagStream::tags)
        .def_readonly("origin", &TagStream::origin)
        .def("is_sorted", &TagStream::is_sorted)
        .def("__len__", [](const TagStream& s) { return s.tags.size(); })
        .def("timestamps", [](const TagStream& s) {
            std::vector<int64_t> out;
            out.reserve(s.tags.size());
            for (const TimeTag& t : s.tags) out.push_back(t.timestamp_ps);
            return out;
        });

    py::class_<SequenceRecord>(m, "SequenceRecord")
        .def_readonly("frame_index", &SequenceRecord::frame_index)
        .def_readonly("occupied_bins", &SequenceRecord::occupied_bins)
        .def_readonly("stray_count", &SequenceRecord::stray_count)
        .def_readonly("duplicate_count", &SequenceRecord::duplicate_count);

    py::class_<EventCounts>(m, "EventCounts")
        .def_property_readonly("counts",
                               [](const EventCounts& e) { return counts_to_dict(e.counts); })
        .def_readonly("cardinality_census", &EventCounts::cardinality_census)
        .def_readonly("frames_seen", &EventCounts::frames_seen)
        .def("total", &EventCounts::total);

    m.def("draw_outcomes", &draw_outcomes, py::arg("distribution"), py::arg("frames"),
          py::arg("seed"));
    m.def("synthesize_stream", &synthesize_stream, py::arg("distribution"), py::arg("spec"),
          py::arg("detector_efficiency"), py::arg("jitter_sigma_ps"), py::arg("frames"),
          py::arg("seed"));
    m.def("bin_tags", &bin_tags, py::arg("stream"), py::arg("spec"), py::arg("window_ns"),
          py::arg("t0_ps") = 0);
    m.def("extract_events", &extract_events, py::arg("records"), py::arg("photons"),
          py::arg("modes"));
    m.def("write_tag_stream", &write_tag_stream, py::arg("path"), py::arg("stream"));
    m.def("read_tag_stream", &read_tag_stream, py::arg("path"));
    m.def("write_tag_stream_csv", &write_tag_stream_csv, py::arg("path"), py::arg("stream"));
    m.def("read_tag_stream_csv", &read_tag_stream_csv, py::arg("path"));

    // validation
    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("method", &ValidationReport::method)
        .def_readonly("statistic", &ValidationReport::statistic)
        .def_property_readonly("p_value",
                               [](const ValidationReport& r) -> py::object {
                                   if (r.p_value) return py::float_(*r.p_value);
                                   return py::none();
                               })
        .def_readonly("counter_trace", &ValidationReport::counter_trace)
        .def_readonly("parameters", &ValidationReport::parameters);

    py::class_<KMeansResult>(m, "KMeansResult")
        .def_readonly("centroids", &KMeansResult::centroids)
        .def_readonly("assignments", &KMeansResult::assignments)
        .def_readonly("iterations", &KMeansResult::iterations);

    py::class_<Chi2Result>(m, "Chi2Result")
        .def_readonly("chi2", &Chi2Result::chi2)
        .def_readonly("p_value", &Chi2Result::p_value)
        .def_readonly("dof", &Chi2Result::dof);

    m.def("statistical_fidelity", &statistical_fidelity, py::arg("p"), py::arg("q"));
    m.def("rne_value", &rne_value, py::arg("matrix"), py::arg("input"), py::arg("outcome"));
    m.def("rne_threshold", &rne_threshold, py::arg("matrix"), py::arg("input"));
    m.def("rne_counter", &rne_counter, py::arg("events"), py::arg("matrix"), py::arg("input"),
          py::arg("threshold"));
    m.def("kmeans_cluster", &kmeans_cluster, py::arg("points"), py::arg("k"), py::arg("seed"));
    m.def("chi2_two_sample", &chi2_two_sample, py::arg("counts_a"), py::arg("counts_b"));
    m.def("regularized_gamma_q", &regularized_gamma_q, py::arg("a"), py::arg("x"));
    m.def(
        "validate_distinguishable",
        [](const py::dict& test_events, const PhotonDistribution& bona_fide, int k,
           int sample_size, int repeats, uint64_t seed) {
            return validate_distinguishable(counts_from_dict(test_events), bona_fide, k,
                                            sample_size, repeats, seed);
        },
        py::arg("test_events"), py::arg("bona_fide"), py::arg("k"), py::arg("sample_size"),
        py::arg("repeats") = 100, py::arg("seed") = 1);

    // config + commands (the CLI pipelines, callable in-process)
    py::class_<RunConfig>(m, "RunConfig")
        .def_readwrite("experiment", &RunConfig::experiment)
        .def_readwrite("source", &RunConfig::source)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def("hash", &RunConfig::hash);
    m.def("load_config", &load_config, py::arg("path"));
    m.def("cmd_compile", &cmd_compile, py::arg("config"), py::arg("out_dir"));
    m.def("cmd_preview", &cmd_preview, py::arg("config"), py::arg("out_dir"));
    m.def("cmd_simulate", &cmd_simulate, py::arg("config"), py::arg("out_dir"));
    m.def("cmd_hom", &cmd_hom, py::arg("config"), py::arg("out_dir"));
    m.def("cmd_reconstruct", &cmd_reconstruct, py::arg("config"), py::arg("tags_path"),
          py::arg("out_dir"));
    m.def("cmd_validate", &cmd_validate, py::arg("config"), py::arg("events_path"),
          py::arg("mode"), py::arg("reference_path"), py::arg("out_dir"));
    m.def("cmd_fidelity", &cmd_fidelity, py::arg("a"), py::arg("b"), py::arg("out_path"));
    m.def("cmd_report", &cmd_report, py::arg("config"), py::arg("tags_path"),
          py::arg("out_dir"));
}
