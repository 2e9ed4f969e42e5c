#include "loopsim/imperfection.hpp"

#include <cmath>
#include <stdexcept>

namespace loopsim {

void SourceModel::validate() const {
    if (!(indistinguishability >= 0.0 && indistinguishability <= 1.0)) {
        throw std::invalid_argument("source: indistinguishability must lie in [0,1]");
    }
    if (!(purity_complement >= 0.0 && purity_complement <= 1.0)) {
        throw std::invalid_argument("source: purity_complement must lie in [0,1]");
    }
    if (!(repetition_rate_hz > 0.0)) {
        throw std::invalid_argument("source: repetition_rate_hz must be > 0");
    }
    if (!(end_to_end_efficiency > 0.0 && end_to_end_efficiency <= 1.0)) {
        throw std::invalid_argument("source: end_to_end_efficiency must lie in (0,1]");
    }
}

PhotonDistribution mix_distinguishability(const PhotonDistribution& indistinguishable,
                                          const PhotonDistribution& distinguishable,
                                          double weight) {
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw std::invalid_argument("mix_distinguishability: weight must lie in [0,1]");
    }
    if (indistinguishable.support != distinguishable.support ||
        indistinguishable.subspace != distinguishable.subspace) {
        throw std::invalid_argument("mix_distinguishability: support/subspace mismatch");
    }
    PhotonDistribution mixed = indistinguishable;
    mixed.model = PhotonModel::mixture;
    double sum = 0.0;
    for (size_t i = 0; i < mixed.probabilities.size(); ++i) {
        mixed.probabilities[i] = weight * indistinguishable.probabilities[i] +
                                 (1.0 - weight) * distinguishable.probabilities[i];
        sum += mixed.probabilities[i];
    }
    for (double& p : mixed.probabilities) p /= sum;
    mixed.pre_normalization_mass = weight * indistinguishable.pre_normalization_mass +
                                   (1.0 - weight) * distinguishable.pre_normalization_mass;
    return mixed;
}

RateEstimate estimate_rates(const SourceModel& model, int photons,
                            double collision_free_mass, double duty) {
    model.validate();
    if (photons < 1) throw std::invalid_argument("estimate_rates: photons must be >= 1");
    if (!(collision_free_mass > 0.0 && collision_free_mass <= 1.0)) {
        throw std::invalid_argument("estimate_rates: collision_free_mass must lie in (0,1]");
    }
    if (!(duty > 0.0 && duty <= 1.0)) {
        throw std::invalid_argument("estimate_rates: duty must lie in (0,1]");
    }
    RateEstimate est;
    est.collision_free_hz = model.repetition_rate_hz * duty *
                            std::pow(model.end_to_end_efficiency, photons) *
                            collision_free_mass;
    est.total_hz = est.collision_free_hz / collision_free_mass;
    return est;
}

}  // namespace loopsim
