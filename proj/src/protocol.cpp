#include "loopsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "loopsim/imperfection.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

void ExperimentSpec::validate() const {
    schedule.validate();
    if (static_cast<int>(input.size()) != schedule.m) {
        throw std::invalid_argument("experiment: input length must equal schedule.m");
    }
    if (!is_collision_free(input)) {
        throw std::invalid_argument("experiment: input bins hold at most one photon");
    }
    if (pattern_total(input) < 1) {
        throw std::invalid_argument("experiment: input must contain at least one photon");
    }
    if (!(sequence_period_ns >= schedule.m * schedule.bin_period_ns)) {
        throw std::invalid_argument("experiment: sequence period must cover all m bins");
    }
}

namespace {

ExperimentSpec make_standard(int photons, Parity parity, std::vector<double> reflectivities) {
    if (photons < 1) throw std::invalid_argument("standard_experiment: photons must be >= 1");
    const int m = 2 * photons;
    ExperimentSpec spec;
    spec.schedule.m = m;
    spec.schedule.reflectivities = std::move(reflectivities);
    spec.schedule.bin_period_ns = 100.0;
    spec.schedule.loop_transmission = 1.0;
    spec.input.assign(m, 0);
    const int first = (parity == Parity::odd) ? 0 : 1;
    for (int i = first; i < m; i += 2) spec.input[i] = 1;
    spec.sequence_period_ns = 2.0 * m * spec.schedule.bin_period_ns;
    spec.label = "n" + std::to_string(photons) +
                 (parity == Parity::odd ? "_odd" : "_even");
    spec.validate();
    return spec;
}

}  // namespace

ExperimentSpec standard_experiment(int photons, Parity parity) {
    if (photons < 1) throw std::invalid_argument("standard_experiment: photons must be >= 1");
    return make_standard(photons, parity, staircase_reflectivities(2 * photons));
}

ExperimentSpec standard_experiment(int photons, Parity parity,
                                   const std::vector<double>& reflectivities) {
    if (photons < 1) throw std::invalid_argument("standard_experiment: photons must be >= 1");
    if (static_cast<int>(reflectivities.size()) != 2 * photons - 1) {
        throw std::invalid_argument("standard_experiment: reflectivity list must have length m-1");
    }
    return make_standard(photons, parity, reflectivities);
}

uint64_t CorrelationHistogram::peak_area(double center_ns) const {
    const double half = window_ns / 2.0;
    const auto lo = static_cast<int64_t>(std::ceil((center_ns - half) / bin_width_ns));
    const auto hi = static_cast<int64_t>(std::floor((center_ns + half) / bin_width_ns));
    uint64_t area = 0;
    for (auto it = counts.lower_bound(lo); it != counts.end() && it->first <= hi; ++it) {
        area += it->second;
    }
    return area;
}

PhotonDistribution hom_bin_state(double mid_reflectivity, PhotonModel model,
                                 double mix_weight, double loop_transmission) {
    ReflectivitySchedule schedule{2, {mid_reflectivity}, 100.0, loop_transmission};
    const ModeMatrix matrix = compile_network(schedule);
    const Pattern input{1, 1};

    auto evaluate = [&](bool classical) {
        PhotonDistribution dist;
        dist.modes = 2;
        dist.photons = 2;
        dist.subspace = Subspace::full;
        dist.model = classical ? PhotonModel::distinguishable : PhotonModel::indistinguishable;
        dist.support = full_outcomes(2, 2);  // (2,0), (1,1), (0,2)
        double mass = 0.0;
        for (const Pattern& outcome : dist.support) {
            const double p = classical
                                 ? outcome_probability_distinguishable(matrix, input, outcome)
                                 : outcome_probability(matrix, input, outcome);
            dist.probabilities.push_back(std::max(p, 0.0));
            mass += dist.probabilities.back();
        }
        // with loop loss this post-selects on both photons surviving
        for (double& p : dist.probabilities) p /= mass;
        dist.pre_normalization_mass = mass;
        return dist;
    };

    switch (model) {
        case PhotonModel::indistinguishable:
            return evaluate(false);
        case PhotonModel::distinguishable:
            return evaluate(true);
        case PhotonModel::mixture:
            return mix_distinguishability(evaluate(false), evaluate(true), mix_weight);
    }
    throw std::invalid_argument("hom_bin_state: unknown model");
}

CorrelationHistogram hom_histogram(const PhotonDistribution& bin_state, double tau_ns,
                                   double frame_period_ns, int frames, uint64_t seed,
                                   double bin_width_ns, double window_ns) {
    bin_state.validate();
    if (frames < 1) throw std::invalid_argument("hom_histogram: frames must be >= 1");
    if (!(tau_ns > 0.0) || !(frame_period_ns > 0.0) || !(bin_width_ns > 0.0)) {
        throw std::invalid_argument("hom_histogram: periods must be positive");
    }

    std::vector<double> cumulative(bin_state.probabilities.size());
    double acc = 0.0;
    for (size_t i = 0; i < cumulative.size(); ++i) {
        acc += bin_state.probabilities[i];
        cumulative[i] = acc;
    }

    std::vector<double> det_a, det_b;  // detection times, ns; sorted by construction
    for (int f = 0; f < frames; ++f) {
        rng::Stream stream(seed, "hom_frame", static_cast<uint64_t>(f));
        const double u = stream.next_double() * acc;
        size_t idx = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                     cumulative.begin();
        if (idx >= bin_state.support.size()) idx = bin_state.support.size() - 1;
        const Pattern& outcome = bin_state.support[idx];
        const double frame_start = static_cast<double>(f) * frame_period_ns;
        for (size_t bin = 0; bin < outcome.size(); ++bin) {
            for (int p = 0; p < outcome[bin]; ++p) {
                const double t = frame_start + static_cast<double>(bin) * tau_ns;
                if (stream.next_bool()) {
                    det_a.push_back(t);
                } else {
                    det_b.push_back(t);
                }
            }
        }
    }

    // histogram all cross-detector pair delays t_b - t_a within +-5 T
    const double span = 5.0 * frame_period_ns;
    const auto max_key = static_cast<int64_t>(std::llround(span / bin_width_ns));
    std::vector<uint64_t> dense(2 * max_key + 1, 0);
    size_t lo = 0;
    for (const double ta : det_a) {
        while (lo < det_b.size() && det_b[lo] < ta - span) ++lo;
        for (size_t j = lo; j < det_b.size() && det_b[j] <= ta + span; ++j) {
            const auto key = static_cast<int64_t>(std::llround((det_b[j] - ta) / bin_width_ns));
            dense[static_cast<size_t>(key + max_key)]++;
        }
    }

    CorrelationHistogram hist;
    hist.bin_width_ns = bin_width_ns;
    hist.window_ns = window_ns;
    for (int64_t k = -max_key; k <= max_key; ++k) {
        const uint64_t c = dense[static_cast<size_t>(k + max_key)];
        if (c > 0) hist.counts[k] = c;
    }
    return hist;
}

double visibility(double c_plus, double c_minus, double c_zero) {
    if (c_plus < 0.0 || c_minus < 0.0 || c_zero < 0.0) {
        throw std::invalid_argument("visibility: peak areas must be non-negative");
    }
    const double correlated = c_plus + c_minus;
    if (correlated + c_zero <= 0.0) {
        throw std::domain_error("visibility: all peak areas are zero");
    }
    return 1.0 - 2.0 * correlated / (correlated + c_zero);
}

}  // namespace loopsim
