#include <doctest.h>

#include <cmath>

#include "loopsim/imperfection.hpp"
#include "loopsim/protocol.hpp"

using namespace loopsim;

TEST_CASE("standard experiment with the staircase rule") {
    const ExperimentSpec eight = standard_experiment(8, Parity::odd);
    CHECK(eight.schedule.m == 16);
    REQUIRE(eight.schedule.reflectivities.size() == 15);
    for (int k = 1; k <= 15; ++k) {
        CHECK(eight.schedule.reflectivities[k - 1] == doctest::Approx(k / (k + 1.0)));
    }
    CHECK(eight.input == Pattern{1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0});

    const ExperimentSpec single = standard_experiment(1, Parity::odd);
    CHECK(single.schedule.m == 2);
    REQUIRE(single.schedule.reflectivities.size() == 1);
    CHECK(single.schedule.reflectivities[0] == doctest::Approx(0.5));
}

TEST_CASE("standard experiment with an explicit list") {
    const std::vector<double> fig_list{0.5, 0.6, 0.7, 0.8, 0.8, 0.8, 0.7, 0.5, 0.4};
    const ExperimentSpec five = standard_experiment(5, Parity::even, fig_list);
    CHECK(five.schedule.m == 10);
    CHECK(five.schedule.reflectivities == fig_list);
    CHECK(five.input == Pattern{0, 1, 0, 1, 0, 1, 0, 1, 0, 1});
    CHECK_THROWS_AS(standard_experiment(5, Parity::even, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("experiment validation") {
    ExperimentSpec spec = standard_experiment(2, Parity::odd);
    spec.input[0] = 2;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = standard_experiment(2, Parity::odd);
    spec.sequence_period_ns = 100.0;  // shorter than m * tau
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("hom bin state for the balanced midpoint") {
    const PhotonDistribution ind = hom_bin_state(0.5, PhotonModel::indistinguishable);
    CHECK(ind.probabilities[0] == doctest::Approx(0.5));
    CHECK(ind.probabilities[1] == 0.0);
    CHECK(ind.probabilities[2] == doctest::Approx(0.5));

    const PhotonDistribution dis = hom_bin_state(0.5, PhotonModel::distinguishable);
    CHECK(dis.probabilities[0] == doctest::Approx(0.25));
    CHECK(dis.probabilities[1] == doctest::Approx(0.5));
    CHECK(dis.probabilities[2] == doctest::Approx(0.25));
}

TEST_CASE("hom bin state at full reflectivity keeps the photons apart") {
    for (const PhotonModel model :
         {PhotonModel::indistinguishable, PhotonModel::distinguishable}) {
        const PhotonDistribution state = hom_bin_state(1.0, model);
        CHECK(state.probabilities[0] == doctest::Approx(0.0));
        CHECK(state.probabilities[1] == doctest::Approx(1.0));
        CHECK(state.probabilities[2] == doctest::Approx(0.0));
    }
}

TEST_CASE("hom bin state mixture equals the convex combination") {
    const double x = 0.7;
    const PhotonDistribution mixed = hom_bin_state(0.5, PhotonModel::mixture, x);
    const PhotonDistribution byhand =
        mix_distinguishability(hom_bin_state(0.5, PhotonModel::indistinguishable),
                               hom_bin_state(0.5, PhotonModel::distinguishable), x);
    for (size_t i = 0; i < mixed.probabilities.size(); ++i) {
        CHECK(mixed.probabilities[i] == doctest::Approx(byhand.probabilities[i]));
    }
}

TEST_CASE("lossy hom bin state keeps the suppression but reweights bunching") {
    const double eta = 0.94;
    const PhotonDistribution state =
        hom_bin_state(0.5, PhotonModel::indistinguishable, 1.0, eta);
    CHECK(state.probabilities[1] == doctest::Approx(0.0));
    // the later output bin takes one more delay traversal
    CHECK(state.probabilities[2] / state.probabilities[0] ==
          doctest::Approx(eta * eta).epsilon(1e-12));
    CHECK(state.pre_normalization_mass < 1.0);
}

TEST_CASE("ideal hom histogram never counts at the bin separation") {
    const PhotonDistribution ideal = hom_bin_state(0.5, PhotonModel::indistinguishable);
    for (uint64_t seed : {1ull, 99ull, 12345ull}) {
        const CorrelationHistogram hist = hom_histogram(ideal, 100.0, 500.0, 2000, seed);
        CHECK(hist.peak_area(100.0) == 0);
        CHECK(hist.peak_area(-100.0) == 0);
        CHECK(hist.peak_area(0.0) > 0);
    }
}

TEST_CASE("single frame with one photon per bin coincides only at the separation") {
    PhotonDistribution point;
    point.modes = 2;
    point.photons = 2;
    point.subspace = Subspace::full;
    point.support = {Pattern{2, 0}, Pattern{1, 1}, Pattern{0, 2}};
    point.probabilities = {0.0, 1.0, 0.0};
    bool saw_pair = false;
    for (uint64_t seed = 0; seed < 32; ++seed) {
        const CorrelationHistogram hist = hom_histogram(point, 100.0, 500.0, 1, seed);
        uint64_t total = 0;
        for (const auto& [key, count] : hist.counts) total += count;
        CHECK(total <= 1);
        if (total == 1) {
            saw_pair = true;
            CHECK(hist.peak_area(100.0) + hist.peak_area(-100.0) == 1);
        }
    }
    CHECK(saw_pair);  // a 50/50 split happens within 32 seeds
}

TEST_CASE("distinguishable histogram reproduces the classical peak ratios") {
    const PhotonDistribution dis = hom_bin_state(0.5, PhotonModel::distinguishable);
    const int frames = 200000;
    const CorrelationHistogram hist = hom_histogram(dis, 100.0, 500.0, frames, 7);
    const double c_plus = static_cast<double>(hist.peak_area(100.0));
    const double c_minus = static_cast<double>(hist.peak_area(-100.0));
    const double c_zero = static_cast<double>(hist.peak_area(0.0));
    const double c_ref = 0.5 * (static_cast<double>(hist.peak_area(500.0)) +
                                static_cast<double>(hist.peak_area(-500.0)));
    // expectations: c_ref = N/2, c_zero = N/4, c_+- = N/8
    const double sigma = std::sqrt(frames / 8.0);
    CHECK(std::abs(c_plus - frames / 8.0) < 5.0 * sigma);
    CHECK(std::abs(c_minus - frames / 8.0) < 5.0 * sigma);
    CHECK(std::abs(c_zero - frames / 4.0) < 5.0 * std::sqrt(frames / 4.0));
    CHECK(std::abs(c_ref - frames / 2.0) < 5.0 * std::sqrt(frames / 2.0));
    CHECK(visibility(c_plus, c_minus, c_zero) == doctest::Approx(0.0).epsilon(0.05));
}

TEST_CASE("histogram is deterministic under its seed") {
    const PhotonDistribution dis = hom_bin_state(0.5, PhotonModel::distinguishable);
    const CorrelationHistogram a = hom_histogram(dis, 100.0, 500.0, 5000, 21);
    const CorrelationHistogram b = hom_histogram(dis, 100.0, 500.0, 5000, 21);
    CHECK(a.counts == b.counts);
    const CorrelationHistogram c = hom_histogram(dis, 100.0, 500.0, 5000, 22);
    CHECK(a.counts != c.counts);
}

TEST_CASE("visibility formula") {
    CHECK(visibility(0.0, 0.0, 10.0) == doctest::Approx(1.0));
    CHECK(visibility(2.5, 2.5, 5.0) == doctest::Approx(0.0));
    // scale invariance
    for (double scale : {0.5, 3.0, 1e6}) {
        CHECK(visibility(scale * 1.0, scale * 2.0, scale * 9.0) ==
              doctest::Approx(visibility(1.0, 2.0, 9.0)));
    }
    CHECK_THROWS_AS(visibility(0.0, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(visibility(-1.0, 0.0, 1.0), std::invalid_argument);
}
