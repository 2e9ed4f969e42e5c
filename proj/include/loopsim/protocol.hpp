#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "loopsim/fock.hpp"
#include "loopsim/network.hpp"

namespace loopsim {

// One run definition: which bins carry a photon, the reflectivity program,
// and the frame repetition period T at which the whole sequence recurs.
struct ExperimentSpec {
    ReflectivitySchedule schedule;
    Pattern input;                  // one entry per bin, values in {0, 1}
    double sequence_period_ns = 0;  // T >= m * tau
    std::string label;

    void validate() const;
};

enum class Parity { odd, even };

// n photons in m = 2n modes at odd or even 1-indexed bins, with the
// staircase program R_k = k/(k+1). Defaults: tau = 100 ns, lossless loop,
// T = 2 m tau.
ExperimentSpec standard_experiment(int photons, Parity parity);
// Same but with an explicit reflectivity list (length must be m-1).
ExperimentSpec standard_experiment(int photons, Parity parity,
                                   const std::vector<double>& reflectivities);

// Second-order coincidence histogram. Counts are keyed by delay in units
// of bin_width_ns (signed); window_ns is the integration window used when
// summing a peak area.
struct CorrelationHistogram {
    double bin_width_ns = 1.0;
    double window_ns = 3.0;
    std::map<int64_t, uint64_t> counts;

    double delay_ns(int64_t key) const { return static_cast<double>(key) * bin_width_ns; }
    uint64_t peak_area(double center_ns) const;
};

// Two-photon output state of the m = 2 network {R(0)=1, R, R(2tau)=1},
// over the outcomes (2,0), (1,1), (0,2). With loop loss the state is
// post-selected on both photons surviving (coincidence detection).
// mix_weight is used only by PhotonModel::mixture.
PhotonDistribution hom_bin_state(double mid_reflectivity, PhotonModel model,
                                 double mix_weight = 1.0, double loop_transmission = 1.0);

// Monte-Carlo synthesis of the two-detector autocorrelation measurement:
// per frame draw a bin state, split every photon 50/50 onto detectors A
// and B, and histogram all A-B pair delays within +-5 T. Deterministic
// under the seed; frame f draws from (seed, "hom_frame", f).
CorrelationHistogram hom_histogram(const PhotonDistribution& bin_state, double tau_ns,
                                   double frame_period_ns, int frames, uint64_t seed,
                                   double bin_width_ns = 1.0, double window_ns = 3.0);

// V2 = 1 - 2 (C+ + C-) / ((C+ + C-) + C0)
double visibility(double c_plus, double c_minus, double c_zero);

}  // namespace loopsim
