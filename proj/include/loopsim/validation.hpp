#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loopsim/fock.hpp"

namespace loopsim {

struct ValidationReport {
    std::string method;  // "rne_uniform" | "kmeans_chi2" | "fidelity"
    double statistic = 0.0;
    std::optional<double> p_value;
    std::vector<int64_t> counter_trace;
    std::map<std::string, double> parameters;
};

// Bhattacharyya overlap sum_i sqrt(p_i q_i); requires identical support
// lists.
double statistical_fidelity(const PhotonDistribution& p, const PhotonDistribution& q);

// Row-norm estimator for one collision-free outcome:
// rho(T) = prod_{j in T} sum_{i in S} |M(j,i)|^2.
double rne_value(const ModeMatrix& matrix, const Pattern& input, const Pattern& outcome);

// Median of rho over the uniform distribution on collision-free outcomes
// (exact enumeration). Splitting at the median makes the counter a
// driftless +-1 walk for a uniform sampler.
double rne_threshold(const ModeMatrix& matrix, const Pattern& input);

// Running counter: +1 when rho(event) > threshold, -1 otherwise.
std::vector<int64_t> rne_counter(const std::vector<Pattern>& events, const ModeMatrix& matrix,
                                 const Pattern& input, double threshold);

struct KMeansResult {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignments;
    int iterations = 0;
};

// Lloyd iteration on 0/1 vectors with greedy farthest-point seeding (first
// centroid drawn from the seed, ties broken by lowest index). Converged
// when assignments stop changing. Requires 2 <= k <= number of distinct
// points.
KMeansResult kmeans_cluster(const std::vector<Pattern>& points, int k, uint64_t seed);

struct Chi2Result {
    double chi2 = 0.0;
    double p_value = 1.0;
    int dof = 0;
};

// Two-sample chi-squared over K cluster occupancies, K-1 degrees of
// freedom; bins empty in both samples are dropped (zero-count merge).
Chi2Result chi2_two_sample(const std::vector<uint64_t>& counts_a,
                           const std::vector<uint64_t>& counts_b);

// Upper-tail regularized incomplete gamma Q(a, x); p-value of a chi2
// statistic is Q(dof/2, chi2/2).
double regularized_gamma_q(double a, double x);

// Two-sample validation against a bona-fide distribution: cluster a
// bona-fide sample of sample_size draws, then for each repeat subsample
// sample_size test events (without replacement), compare cluster
// occupancies by chi-squared, and report the p-value of the mean chi2
// against the chi2(K-1) law.
ValidationReport validate_distinguishable(const std::map<Pattern, uint64_t>& test_events,
                                          const PhotonDistribution& bona_fide, int k,
                                          int sample_size, int repeats, uint64_t seed);

}  // namespace loopsim
