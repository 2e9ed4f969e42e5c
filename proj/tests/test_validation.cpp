#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "loopsim/rng.hpp"
#include "loopsim/validation.hpp"

using namespace loopsim;

namespace {

PhotonDistribution make_distribution(std::vector<Pattern> support,
                                     std::vector<double> probabilities) {
    PhotonDistribution d;
    d.support = std::move(support);
    d.probabilities = std::move(probabilities);
    d.modes = static_cast<int>(d.support[0].size());
    d.photons = pattern_total(d.support[0]);
    return d;
}

ModeMatrix fourier_matrix(int m) {
    ModeMatrix f(m, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            f(j, i) = std::polar(1.0 / std::sqrt(m), 2.0 * rng::kPi * j * i / m);
        }
    }
    return f;
}

double sq_dist(const std::vector<double>& c, const Pattern& p) {
    double d = 0.0;
    for (size_t i = 0; i < c.size(); ++i) {
        const double diff = c[i] - p[i];
        d += diff * diff;
    }
    return d;
}

}  // namespace

TEST_CASE("fidelity of identical and disjoint distributions") {
    const auto support = collision_free_outcomes(4, 2);
    std::vector<double> p(support.size(), 1.0 / support.size());
    const PhotonDistribution a = make_distribution(support, p);
    CHECK(statistical_fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> left(support.size(), 0.0), right(support.size(), 0.0);
    left[0] = left[1] = 0.5;
    right[2] = right[3] = 0.5;
    const PhotonDistribution pl = make_distribution(support, left);
    const PhotonDistribution pr = make_distribution(support, right);
    CHECK(statistical_fidelity(pl, pr) == 0.0);
    CHECK(statistical_fidelity(pl, pr) == statistical_fidelity(pr, pl));

    PhotonDistribution other = a;
    other.support[0] = Pattern{0, 0, 1, 1};
    other.support[5] = Pattern{1, 1, 0, 0};
    CHECK_THROWS_AS(statistical_fidelity(a, other), std::invalid_argument);
}

TEST_CASE("fidelity is one only for equal distributions") {
    const auto support = collision_free_outcomes(4, 2);
    std::vector<double> p(support.size(), 1.0 / support.size());
    std::vector<double> q = p;
    q[0] += 0.1;
    q[1] -= 0.1;
    const PhotonDistribution dp = make_distribution(support, p);
    const PhotonDistribution dq = make_distribution(support, q);
    CHECK(statistical_fidelity(dp, dq) < 1.0 - 1e-4);
}

TEST_CASE("balanced matrix gives a flat estimator") {
    const int m = 6, n = 3;
    const ModeMatrix f = fourier_matrix(m);
    Pattern input(m, 0);
    for (int i = 0; i < n; ++i) input[i] = 1;
    const double expected = std::pow(static_cast<double>(n) / m, n);
    for (const Pattern& outcome : collision_free_outcomes(m, n)) {
        CHECK(rne_value(f, input, outcome) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(rne_threshold(f, input) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("threshold is the median over the enumerated outcomes") {
    const ModeMatrix m = compile_network({4, {0.5, 0.5, 0.5}, 100.0, 1.0});
    const Pattern input{1, 0, 1, 0};
    std::vector<double> values;
    for (const Pattern& outcome : collision_free_outcomes(4, 2)) {
        values.push_back(rne_value(m, input, outcome));
    }
    std::sort(values.begin(), values.end());
    const double median = 0.5 * (values[2] + values[3]);  // six outcomes
    CHECK(rne_threshold(m, input) == doctest::Approx(median).epsilon(1e-12));
    CHECK_THROWS_AS(rne_threshold(m, Pattern{0, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(rne_threshold(m, Pattern{2, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("counter steps by one per event") {
    const ModeMatrix m = compile_network({4, {0.4, 0.7, 0.2}, 100.0, 1.0});
    const Pattern input{1, 0, 1, 0};
    const double threshold = rne_threshold(m, input);
    const auto events = collision_free_outcomes(4, 2);
    const std::vector<int64_t> trace = rne_counter(events, m, input, threshold);
    REQUIRE(trace.size() == events.size());
    int64_t previous = 0;
    for (int64_t value : trace) {
        CHECK(std::abs(value - previous) == 1);
        previous = value;
    }
    CHECK(rne_counter({}, m, input, threshold).empty());
}

TEST_CASE("kmeans separates two well-separated clouds") {
    std::vector<Pattern> points;
    for (int i = 0; i < 10; ++i) points.push_back(Pattern{1, 1, 1, 0, 0, 0});
    for (int i = 0; i < 10; ++i) points.push_back(Pattern{0, 0, 0, 1, 1, 1});
    points[3][0] = 0;  // a little intra-cloud variation
    points[14][5] = 0;
    const KMeansResult result = kmeans_cluster(points, 2, 7);
    for (int i = 1; i < 10; ++i) CHECK(result.assignments[i] == result.assignments[0]);
    for (int i = 11; i < 20; ++i) CHECK(result.assignments[i] == result.assignments[10]);
    CHECK(result.assignments[0] != result.assignments[10]);
}

TEST_CASE("kmeans rejects degenerate inputs") {
    std::vector<Pattern> identical(5, Pattern{1, 0, 1});
    CHECK_THROWS_AS(kmeans_cluster(identical, 2, 1), std::invalid_argument);
    std::vector<Pattern> two = {Pattern{1, 0}, Pattern{0, 1}};
    CHECK_THROWS_AS(kmeans_cluster(two, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(kmeans_cluster(two, 1, 1), std::invalid_argument);
}

TEST_CASE("kmeans matches an independent Lloyd run") {
    // fixed 20-point set
    std::vector<Pattern> points;
    rng::Stream stream(99, "kmeans_points");
    for (int i = 0; i < 20; ++i) {
        Pattern p(8, 0);
        for (int d = 0; d < 8; ++d) p[d] = stream.next_bool() ? 1 : 0;
        points.push_back(p);
    }
    const uint64_t seed = 5;
    const int k = 3;
    const KMeansResult fast = kmeans_cluster(points, k, seed);

    // reference: same seeding rule, textbook Lloyd
    std::vector<std::vector<double>> centroids;
    {
        rng::Stream seeder(seed, "kmeans_seed");
        const size_t first = seeder.next_below(points.size());
        centroids.emplace_back(points[first].begin(), points[first].end());
    }
    while (centroids.size() < static_cast<size_t>(k)) {
        size_t far = 0;
        double far_d = -1.0;
        for (size_t i = 0; i < points.size(); ++i) {
            double d = 1e300;
            for (const auto& c : centroids) d = std::min(d, sq_dist(c, points[i]));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        centroids.emplace_back(points[far].begin(), points[far].end());
    }
    std::vector<int> assign(points.size(), -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (size_t i = 0; i < points.size(); ++i) {
            int best = 0;
            double best_d = 1e300;
            for (size_t c = 0; c < centroids.size(); ++c) {
                const double d = sq_dist(centroids[c], points[i]);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (best != assign[i]) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<std::vector<double>> sums(k, std::vector<double>(8, 0.0));
        std::vector<int> sizes(k, 0);
        for (size_t i = 0; i < points.size(); ++i) {
            sizes[assign[i]] += 1;
            for (int d = 0; d < 8; ++d) sums[assign[i]][d] += points[i][d];
        }
        for (int c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            for (int d = 0; d < 8; ++d) centroids[c][d] = sums[c][d] / sizes[c];
        }
    }
    CHECK(fast.assignments == assign);
}

TEST_CASE("chi2 of identical samples is zero with p one") {
    const Chi2Result r = chi2_two_sample({10, 20, 30}, {10, 20, 30});
    CHECK(r.chi2 == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK(r.dof == 2);
}

TEST_CASE("chi2 closed-form check and strong rejection") {
    // equal totals: chi2 = (50-90)^2/140 + (50-10)^2/60 = 800/21
    const Chi2Result r = chi2_two_sample({50, 50}, {90, 10});
    CHECK(r.chi2 == doctest::Approx(800.0 / 21.0).epsilon(1e-12));
    CHECK(r.dof == 1);
    CHECK(r.p_value < 0.001);
}

TEST_CASE("chi2 drops bins empty in both samples") {
    const Chi2Result r = chi2_two_sample({10, 0, 20}, {12, 0, 18});
    CHECK(r.dof == 1);
    const Chi2Result full = chi2_two_sample({10, 20}, {12, 18});
    CHECK(r.chi2 == doctest::Approx(full.chi2));
}

TEST_CASE("chi2 is invariant under simultaneous label permutation") {
    const std::vector<uint64_t> a{5, 25, 40, 30}, b{9, 21, 45, 25};
    const Chi2Result base = chi2_two_sample(a, b);
    const std::vector<uint64_t> ap{40, 5, 30, 25}, bp{45, 9, 25, 21};
    const Chi2Result permuted = chi2_two_sample(ap, bp);
    CHECK(base.chi2 == doctest::Approx(permuted.chi2));
    CHECK(base.p_value == doctest::Approx(permuted.p_value));
}

TEST_CASE("regularized gamma q against closed forms") {
    // dof 2: Q(1, x) = exp(-x); dof 4: Q(2, x) = (1 + x) exp(-x)
    for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0}) {
        CHECK(regularized_gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
        CHECK(regularized_gamma_q(2.0, x) ==
              doctest::Approx((1.0 + x) * std::exp(-x)).epsilon(1e-12));
        // dof 1: Q(1/2, x) = erfc(sqrt(x))
        CHECK(regularized_gamma_q(0.5, x) ==
              doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-12));
    }
    CHECK(regularized_gamma_q(3.0, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(regularized_gamma_q(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("two-sample p-values are roughly uniform under the null") {
    // multinomial draws from one fixed distribution, many seeds
    const std::vector<double> probs{0.3, 0.25, 0.2, 0.15, 0.1};
    const int draws = 600;
    std::vector<double> pvalues;
    rng::Stream master(1234, "chi2_null");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<uint64_t> a(probs.size(), 0), b(probs.size(), 0);
        for (int i = 0; i < draws; ++i) {
            const double u = master.next_double();
            double acc = 0.0;
            for (size_t k = 0; k < probs.size(); ++k) {
                acc += probs[k];
                if (u < acc || k == probs.size() - 1) {
                    a[k] += 1;
                    break;
                }
            }
            const double v = master.next_double();
            acc = 0.0;
            for (size_t k = 0; k < probs.size(); ++k) {
                acc += probs[k];
                if (v < acc || k == probs.size() - 1) {
                    b[k] += 1;
                    break;
                }
            }
        }
        pvalues.push_back(chi2_two_sample(a, b).p_value);
    }
    std::sort(pvalues.begin(), pvalues.end());
    double ks = 0.0;
    for (size_t i = 0; i < pvalues.size(); ++i) {
        const double empirical = (i + 1.0) / pvalues.size();
        ks = std::max(ks, std::abs(empirical - pvalues[i]));
    }
    // Kolmogorov-Smirnov sanity bound at the 0.1% level for 200 samples
    CHECK(ks < 1.95 / std::sqrt(200.0));
}

TEST_CASE("validate_distinguishable is deterministic and keyed by seed") {
    const ModeMatrix m = compile_network({6, staircase_reflectivities(6), 100.0, 1.0});
    const Pattern input{1, 0, 1, 0, 1, 0};
    const PhotonDistribution ideal = output_distribution(
        m, input, Subspace::collision_free, PhotonModel::indistinguishable);
    std::map<Pattern, uint64_t> events;
    for (const Pattern& p : sample_patterns(ideal, 600, 404)) events[p] += 1;
    const ValidationReport a = validate_distinguishable(events, ideal, 4, 300, 20, 5);
    const ValidationReport b = validate_distinguishable(events, ideal, 4, 300, 20, 5);
    CHECK(a.statistic == b.statistic);
    CHECK(*a.p_value == *b.p_value);
    const ValidationReport c = validate_distinguishable(events, ideal, 4, 300, 20, 6);
    CHECK(a.statistic != c.statistic);
    CHECK(a.method == "kmeans_chi2");
    CHECK(a.parameters.at("K") == 4);
    CHECK_THROWS_AS(validate_distinguishable(events, ideal, 4, 10000, 20, 5),
                    std::invalid_argument);
}
