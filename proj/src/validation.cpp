#include "loopsim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "loopsim/rng.hpp"

namespace loopsim {

double statistical_fidelity(const PhotonDistribution& p, const PhotonDistribution& q) {
    if (p.support != q.support) {
        throw std::invalid_argument("statistical_fidelity: supports must be identical");
    }
    double fidelity = 0.0;
    for (size_t i = 0; i < p.probabilities.size(); ++i) {
        fidelity += std::sqrt(std::max(p.probabilities[i], 0.0) *
                              std::max(q.probabilities[i], 0.0));
    }
    return fidelity;
}

namespace {

std::vector<double> selected_row_masses(const ModeMatrix& matrix, const Pattern& input) {
    const int m = static_cast<int>(matrix.rows());
    if (static_cast<int>(input.size()) != m) {
        throw std::invalid_argument("rne: input length must equal matrix dim");
    }
    if (!is_collision_free(input)) {
        throw std::invalid_argument("rne: input must be collision-free");
    }
    std::vector<double> mass(m, 0.0);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            if (input[i] == 1) mass[j] += std::norm(matrix(j, i));
        }
    }
    return mass;
}

}  // namespace

double rne_value(const ModeMatrix& matrix, const Pattern& input, const Pattern& outcome) {
    const std::vector<double> mass = selected_row_masses(matrix, input);
    if (outcome.size() != mass.size() || !is_collision_free(outcome)) {
        throw std::invalid_argument("rne: outcome must be a collision-free pattern over m modes");
    }
    double rho = 1.0;
    for (size_t j = 0; j < outcome.size(); ++j) {
        if (outcome[j] == 1) rho *= mass[j];
    }
    return rho;
}

double rne_threshold(const ModeMatrix& matrix, const Pattern& input) {
    const std::vector<double> mass = selected_row_masses(matrix, input);
    const int m = static_cast<int>(mass.size());
    const int n = pattern_total(input);
    if (n < 1) throw std::invalid_argument("rne_threshold: need at least one photon");

    std::vector<double> values;
    values.reserve(binomial(m, n));
    for (const Pattern& outcome : collision_free_outcomes(m, n)) {
        double rho = 1.0;
        for (int j = 0; j < m; ++j) {
            if (outcome[j] == 1) rho *= mass[j];
        }
        values.push_back(rho);
    }
    std::sort(values.begin(), values.end());
    const size_t count = values.size();
    if (count % 2 == 1) return values[count / 2];
    return 0.5 * (values[count / 2 - 1] + values[count / 2]);
}

std::vector<int64_t> rne_counter(const std::vector<Pattern>& events, const ModeMatrix& matrix,
                                 const Pattern& input, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("rne_counter: threshold must be > 0");
    const std::vector<double> mass = selected_row_masses(matrix, input);
    std::vector<int64_t> trace;
    trace.reserve(events.size());
    int64_t counter = 0;
    for (const Pattern& event : events) {
        if (event.size() != mass.size() || !is_collision_free(event)) {
            throw std::invalid_argument("rne_counter: events must be collision-free patterns");
        }
        double rho = 1.0;
        for (size_t j = 0; j < event.size(); ++j) {
            if (event[j] == 1) rho *= mass[j];
        }
        counter += (rho > threshold) ? 1 : -1;
        trace.push_back(counter);
    }
    return trace;
}

namespace {

double squared_distance(const std::vector<double>& a, const Pattern& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - static_cast<double>(b[i]);
        d += diff * diff;
    }
    return d;
}

int nearest_centroid(const std::vector<std::vector<double>>& centroids, const Pattern& point) {
    int best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(centroids[c], point);
        if (d < best_distance) {
            best_distance = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

}  // namespace

KMeansResult kmeans_cluster(const std::vector<Pattern>& points, int k, uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kmeans_cluster: k must be >= 2");
    if (points.empty()) throw std::invalid_argument("kmeans_cluster: no points");
    const size_t dim = points[0].size();
    for (const Pattern& p : points) {
        if (p.size() != dim) throw std::invalid_argument("kmeans_cluster: ragged points");
    }
    const std::set<Pattern> distinct(points.begin(), points.end());
    if (static_cast<size_t>(k) > distinct.size()) {
        throw std::invalid_argument("kmeans_cluster: k exceeds number of distinct points");
    }

    const size_t count = points.size();
    KMeansResult result;
    result.centroids.reserve(k);

    // greedy farthest-point seeding, first pick from the seed
    rng::Stream stream(seed, "kmeans_seed");
    const size_t first = stream.next_below(count);
    auto as_doubles = [](const Pattern& p) {
        return std::vector<double>(p.begin(), p.end());
    };
    result.centroids.push_back(as_doubles(points[first]));
    while (result.centroids.size() < static_cast<size_t>(k)) {
        size_t farthest = 0;
        double farthest_sq = -1.0;
        for (size_t i = 0; i < count; ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& c : result.centroids) {
                d = std::min(d, squared_distance(c, points[i]));
            }
            if (d > farthest_sq) {
                farthest_sq = d;
                farthest = i;
            }
        }
        result.centroids.push_back(as_doubles(points[farthest]));
    }

    // Lloyd iteration until assignments are stable
    result.assignments.assign(count, -1);
    for (int iter = 0; iter < 500; ++iter) {
        bool changed = false;
        for (size_t i = 0; i < count; ++i) {
            const int a = nearest_centroid(result.centroids, points[i]);
            if (a != result.assignments[i]) {
                result.assignments[i] = a;
                changed = true;
            }
        }
        result.iterations = iter + 1;
        if (!changed) break;
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<int> sizes(k, 0);
        for (size_t i = 0; i < count; ++i) {
            const int a = result.assignments[i];
            sizes[a] += 1;
            for (size_t d = 0; d < dim; ++d) sums[a][d] += points[i][d];
        }
        for (int c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;  // empty cluster keeps its centroid
            for (size_t d = 0; d < dim; ++d) result.centroids[c][d] = sums[c][d] / sizes[c];
        }
    }
    return result;
}

// Regularized incomplete gamma, series and continued-fraction forms
// (Numerical Recipes style); P(a,x) + Q(a,x) = 1.
namespace {

double gamma_p_series(double a, double x) {
    const int max_iter = 500;
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < max_iter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    const int max_iter = 500;
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw std::invalid_argument("regularized_gamma_q: need a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

Chi2Result chi2_two_sample(const std::vector<uint64_t>& counts_a,
                           const std::vector<uint64_t>& counts_b) {
    if (counts_a.size() != counts_b.size() || counts_a.size() < 2) {
        throw std::invalid_argument("chi2_two_sample: need equal lengths K >= 2");
    }
    const double total_a = std::accumulate(counts_a.begin(), counts_a.end(), 0.0);
    const double total_b = std::accumulate(counts_b.begin(), counts_b.end(), 0.0);
    if (total_a <= 0.0 || total_b <= 0.0) {
        throw std::invalid_argument("chi2_two_sample: each sample needs positive total");
    }
    const double scale_a = std::sqrt(total_b / total_a);
    const double scale_b = std::sqrt(total_a / total_b);

    Chi2Result result;
    int used_bins = 0;
    for (size_t i = 0; i < counts_a.size(); ++i) {
        const double a = static_cast<double>(counts_a[i]);
        const double b = static_cast<double>(counts_b[i]);
        if (a + b == 0.0) continue;  // empty in both samples: merged away
        const double diff = scale_a * a - scale_b * b;
        result.chi2 += diff * diff / (a + b);
        ++used_bins;
    }
    result.dof = used_bins - 1;
    result.p_value = result.dof >= 1
                         ? regularized_gamma_q(result.dof / 2.0, result.chi2 / 2.0)
                         : 1.0;
    return result;
}

ValidationReport validate_distinguishable(const std::map<Pattern, uint64_t>& test_events,
                                          const PhotonDistribution& bona_fide, int k,
                                          int sample_size, int repeats, uint64_t seed) {
    if (sample_size < 1) throw std::invalid_argument("validate: sample_size must be >= 1");
    if (repeats < 1) throw std::invalid_argument("validate: repeats must be >= 1");
    uint64_t total = 0;
    for (const auto& [pattern, count] : test_events) total += count;
    if (total < static_cast<uint64_t>(sample_size)) {
        throw std::invalid_argument("validate: fewer test events than sample_size");
    }

    // bona-fide reference sample and its clustering
    const std::vector<Pattern> bona_sample =
        sample_patterns(bona_fide, sample_size, rng::derive_seed(seed, "bona_sample"));
    const KMeansResult clusters =
        kmeans_cluster(bona_sample, k, rng::derive_seed(seed, "kmeans"));
    std::vector<uint64_t> counts_a(k, 0);
    for (int a : clusters.assignments) counts_a[a] += 1;

    // flatten the test events in deterministic (map) order
    std::vector<const Pattern*> pool;
    pool.reserve(total);
    for (const auto& [pattern, count] : test_events) {
        for (uint64_t c = 0; c < count; ++c) pool.push_back(&pattern);
    }

    double chi2_sum = 0.0;
    std::vector<size_t> indices(pool.size());
    for (int r = 0; r < repeats; ++r) {
        rng::Stream stream(seed, "subsample", static_cast<uint64_t>(r));
        std::iota(indices.begin(), indices.end(), size_t{0});
        std::vector<uint64_t> counts_b(k, 0);
        // partial Fisher-Yates: first sample_size entries form the subsample
        for (int i = 0; i < sample_size; ++i) {
            const size_t j = i + stream.next_below(indices.size() - i);
            std::swap(indices[i], indices[j]);
            counts_b[nearest_centroid(clusters.centroids, *pool[indices[i]])] += 1;
        }
        chi2_sum += chi2_two_sample(counts_a, counts_b).chi2;
    }
    const double mean_chi2 = chi2_sum / repeats;

    ValidationReport report;
    report.method = "kmeans_chi2";
    report.statistic = mean_chi2;
    // mean chi2 referred to the chi2(K-1) law
    report.p_value = regularized_gamma_q((k - 1) / 2.0, mean_chi2 / 2.0);
    report.parameters["K"] = k;
    report.parameters["sample_size"] = sample_size;
    report.parameters["repeats"] = repeats;
    report.parameters["seed"] = static_cast<double>(seed);
    report.parameters["kmeans_iterations"] = clusters.iterations;
    return report;
}

}  // namespace loopsim
