#pragma once

#include "loopsim/fock.hpp"

namespace loopsim {

// Source and detection figures of merit. purity_complement records the
// measured g2(0); multi-photon emission is not simulated.
struct SourceModel {
    double indistinguishability = 1.0;    // pairwise wavepacket overlap, in [0,1]
    double purity_complement = 0.0;       // g2(0), recorded only
    double repetition_rate_hz = 80e6;
    double end_to_end_efficiency = 1.0;   // per photon: source x optics x detector

    void validate() const;
};

// First-order partial-distinguishability surrogate: pointwise convex
// combination weight*P_ind + (1-weight)*P_dist over identical supports.
PhotonDistribution mix_distinguishability(const PhotonDistribution& indistinguishable,
                                          const PhotonDistribution& distinguishable,
                                          double weight);

struct RateEstimate {
    double collision_free_hz = 0.0;
    double total_hz = 0.0;
};

// collision_free_hz = repetition_rate * duty * efficiency^n * collision_free_mass;
// total_hz = collision_free_hz / collision_free_mass. The duty factor is the
// fraction of laser triggers that start a sequence frame.
RateEstimate estimate_rates(const SourceModel& model, int photons,
                            double collision_free_mass, double duty);

}  // namespace loopsim
