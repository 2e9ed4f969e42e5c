#include "loopsim/fock.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "loopsim/rng.hpp"

namespace loopsim {

namespace {

// Ryser with Gray-code subset iteration:
//   Perm(A) = (-1)^d sum_{S nonempty} (-1)^{|S|} prod_i sum_{j in S} a(i,j)
// Consecutive subsets differ in one column, so the row sums update in O(d).
template <typename Scalar, typename Matrix>
Scalar ryser_permanent(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("permanent: matrix must be square");
    const int d = static_cast<int>(a.rows());
    if (d == 0) return Scalar(1);
    if (d == 1) return a(0, 0);
    if (d > 62) throw std::invalid_argument("permanent: dimension too large");

    std::vector<Scalar> row_sum(d, Scalar(0));
    Scalar total(0);
    uint64_t gray = 0;
    int included = 0;
    const uint64_t subsets = 1ull << d;
    for (uint64_t k = 1; k < subsets; ++k) {
        const uint64_t next = k ^ (k >> 1);
        const uint64_t changed = next ^ gray;
        const int col = std::countr_zero(changed);
        if (next & changed) {
            for (int i = 0; i < d; ++i) row_sum[i] += a(i, col);
            ++included;
        } else {
            for (int i = 0; i < d; ++i) row_sum[i] -= a(i, col);
            --included;
        }
        gray = next;
        Scalar prod = row_sum[0];
        for (int i = 1; i < d; ++i) prod *= row_sum[i];
        total += (included % 2 == 0) ? prod : -prod;
    }
    return (d % 2 == 0) ? total : -total;
}

int factorial(int n) {
    int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void check_photon_numbers(const ModeMatrix& matrix, const Pattern& input,
                          const Pattern& output) {
    const auto m = static_cast<size_t>(matrix.rows());
    if (input.size() != m || output.size() != m) {
        throw std::invalid_argument("outcome probability: pattern length must equal matrix dim");
    }
    const int n_in = pattern_total(input);
    const int n_out = pattern_total(output);
    if (n_in != n_out || n_in < 1) {
        throw std::invalid_argument("outcome probability: photon numbers must match and be >= 1");
    }
}

}  // namespace

std::complex<double> permanent(const Eigen::MatrixXcd& a) {
    return ryser_permanent<std::complex<double>>(a);
}

double permanent(const Eigen::MatrixXd& a) { return ryser_permanent<double>(a); }

std::string to_string(Subspace s) {
    return s == Subspace::full ? "full" : "collision_free";
}

std::string to_string(PhotonModel m) {
    switch (m) {
        case PhotonModel::indistinguishable: return "indistinguishable";
        case PhotonModel::distinguishable: return "distinguishable";
        case PhotonModel::mixture: return "mixture";
    }
    return "indistinguishable";
}

Subspace subspace_from_string(const std::string& s) {
    if (s == "full") return Subspace::full;
    if (s == "collision_free") return Subspace::collision_free;
    throw std::invalid_argument("unknown subspace tag: " + s);
}

PhotonModel model_from_string(const std::string& s) {
    if (s == "indistinguishable") return PhotonModel::indistinguishable;
    if (s == "distinguishable") return PhotonModel::distinguishable;
    if (s == "mixture") return PhotonModel::mixture;
    throw std::invalid_argument("unknown photon model tag: " + s);
}

void PhotonDistribution::validate() const {
    if (support.size() != probabilities.size()) {
        throw std::invalid_argument("distribution: support/probability length mismatch");
    }
    double sum = 0.0;
    for (size_t i = 0; i < support.size(); ++i) {
        if (static_cast<int>(support[i].size()) != modes) {
            throw std::invalid_argument("distribution: pattern length mismatch");
        }
        if (pattern_total(support[i]) != photons) {
            throw std::invalid_argument("distribution: photon number mismatch in support");
        }
        if (probabilities[i] < 0.0) {
            throw std::invalid_argument("distribution: negative probability");
        }
        sum += probabilities[i];
    }
    if (!support.empty() && std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("distribution: probabilities must sum to 1");
    }
}

Eigen::MatrixXcd select_submatrix(const ModeMatrix& matrix, const Pattern& input,
                                  const Pattern& output) {
    check_photon_numbers(matrix, input, output);
    const int n = pattern_total(input);
    std::vector<int> cols, rows;
    cols.reserve(n);
    rows.reserve(n);
    for (size_t i = 0; i < input.size(); ++i) {
        for (int c = 0; c < input[i]; ++c) cols.push_back(static_cast<int>(i));
    }
    for (size_t j = 0; j < output.size(); ++j) {
        for (int c = 0; c < output[j]; ++c) rows.push_back(static_cast<int>(j));
    }
    Eigen::MatrixXcd sub(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) sub(r, c) = matrix(rows[r], cols[c]);
    }
    return sub;
}

double outcome_probability(const ModeMatrix& matrix, const Pattern& input,
                           const Pattern& output) {
    const Eigen::MatrixXcd sub = select_submatrix(matrix, input, output);
    double denom = 1.0;
    for (int s : input) denom *= factorial(s);
    for (int t : output) denom *= factorial(t);
    return std::norm(permanent(sub)) / denom;
}

double outcome_probability_distinguishable(const ModeMatrix& matrix, const Pattern& input,
                                           const Pattern& output) {
    const Eigen::MatrixXcd sub = select_submatrix(matrix, input, output);
    const Eigen::MatrixXd weights = sub.cwiseAbs2();
    double denom = 1.0;
    for (int t : output) denom *= factorial(t);
    return permanent(weights) / denom;
}

PhotonDistribution output_distribution(const ModeMatrix& matrix, const Pattern& input,
                                       Subspace subspace, PhotonModel model, int threads) {
    const int m = static_cast<int>(matrix.rows());
    if (static_cast<int>(input.size()) != m) {
        throw std::invalid_argument("output_distribution: input length must equal matrix dim");
    }
    const int n = pattern_total(input);
    if (n < 1) throw std::invalid_argument("output_distribution: need at least one photon");
    if (model == PhotonModel::mixture) {
        throw std::invalid_argument(
            "output_distribution: build mixtures via mix_distinguishability");
    }
    if (threads < 1) throw std::invalid_argument("output_distribution: threads must be >= 1");

    PhotonDistribution dist;
    dist.modes = m;
    dist.photons = n;
    dist.subspace = subspace;
    dist.model = model;

    if (subspace == Subspace::full) {
        if (n > 4) {
            throw std::invalid_argument(
                "output_distribution: full space enumeration limited to n <= 4");
        }
        const double unitary_defect =
            (matrix.adjoint() * matrix - ModeMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
        if (unitary_defect > 1e-9) {
            throw std::invalid_argument(
                "output_distribution: full space unsupported for lossy networks");
        }
        dist.support = full_outcomes(m, n);
    } else {
        if (n > m) throw std::invalid_argument("output_distribution: n exceeds mode count");
        dist.support = collision_free_outcomes(m, n);
    }

    const size_t count = dist.support.size();
    dist.probabilities.assign(count, 0.0);
    const bool classical = (model == PhotonModel::distinguishable);

    auto evaluate = [&](size_t idx) {
        const double p =
            classical ? outcome_probability_distinguishable(matrix, input, dist.support[idx])
                      : outcome_probability(matrix, input, dist.support[idx]);
        // Ryser cancellation can leave suppressed outcomes at -1e-18
        dist.probabilities[idx] = std::max(p, 0.0);
    };

    if (threads == 1 || count < 64) {
        for (size_t i = 0; i < count; ++i) evaluate(i);
    } else {
        // dynamic chunks; each probability is written at its own index, so
        // the result does not depend on scheduling
        std::atomic<size_t> cursor{0};
        constexpr size_t kChunk = 32;
        auto worker = [&] {
            for (;;) {
                const size_t begin = cursor.fetch_add(kChunk);
                if (begin >= count) return;
                const size_t end = std::min(begin + kChunk, count);
                for (size_t i = begin; i < end; ++i) evaluate(i);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double mass = 0.0;
    for (double p : dist.probabilities) mass += p;
    if (!(mass > 0.0)) {
        throw std::domain_error("output_distribution: requested subspace has zero mass");
    }
    for (double& p : dist.probabilities) p /= mass;
    dist.pre_normalization_mass = mass;
    return dist;
}

std::vector<Pattern> sample_patterns(const PhotonDistribution& dist, int count,
                                     uint64_t seed) {
    if (count < 0) throw std::invalid_argument("sample_patterns: count must be >= 0");
    if (dist.support.empty()) throw std::invalid_argument("sample_patterns: empty support");
    std::vector<double> cumulative(dist.probabilities.size());
    double acc = 0.0;
    for (size_t i = 0; i < dist.probabilities.size(); ++i) {
        acc += dist.probabilities[i];
        cumulative[i] = acc;
    }
    std::vector<Pattern> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        rng::Stream stream(seed, "sample", static_cast<uint64_t>(k));
        const double u = stream.next_double() * acc;
        size_t idx = std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                     cumulative.begin();
        if (idx >= dist.support.size()) idx = dist.support.size() - 1;
        out.push_back(dist.support[idx]);
    }
    return out;
}

}  // namespace loopsim
