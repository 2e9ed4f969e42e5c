#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "loopsim/network.hpp"
#include "loopsim/pattern.hpp"

namespace loopsim {

// Matrix permanent via Ryser's formula with Gray-code subset iteration,
// O(2^d * d). d = 0 returns 1.
std::complex<double> permanent(const Eigen::MatrixXcd& a);
double permanent(const Eigen::MatrixXd& a);

enum class Subspace { full, collision_free };
enum class PhotonModel { indistinguishable, distinguishable, mixture };

std::string to_string(Subspace s);
std::string to_string(PhotonModel m);
Subspace subspace_from_string(const std::string& s);
PhotonModel model_from_string(const std::string& s);

// Normalized probability map over occupation patterns. Support is always
// listed in the canonical pattern order (photons packed into low bins
// first) so serialized distributions diff cleanly across implementations.
struct PhotonDistribution {
    std::vector<Pattern> support;
    std::vector<double> probabilities;
    Subspace subspace = Subspace::collision_free;
    PhotonModel model = PhotonModel::indistinguishable;
    int modes = 0;
    int photons = 0;
    // Probability mass of the declared subspace before renormalization
    // (the accumulated collision-free probability when subspace is
    // collision_free and the network is lossy).
    double pre_normalization_mass = 1.0;

    void validate() const;
};

// n x n submatrix with column i repeated input[i] times and row j repeated
// output[j] times.
Eigen::MatrixXcd select_submatrix(const ModeMatrix& matrix, const Pattern& input,
                                  const Pattern& output);

// |Perm(M_{S,T})|^2 / (prod_i s_i! prod_j t_j!)
double outcome_probability(const ModeMatrix& matrix, const Pattern& input,
                           const Pattern& output);

// Perm(W_{S,T}) / prod_j t_j! with W = |M|^2 entrywise: photons carrying
// which-path labels, no interference.
double outcome_probability_distinguishable(const ModeMatrix& matrix, const Pattern& input,
                                           const Pattern& output);

// Evaluate the chosen probability rule over the requested support and
// renormalize within it, recording the pre-normalization mass. The full
// Fock space is only enumerated for n <= 4 and a unitary matrix (lossy
// networks would need loss outcomes); use the collision-free subspace
// otherwise. `threads` parallelizes the per-outcome map; the result is
// identical for any thread count.
PhotonDistribution output_distribution(const ModeMatrix& matrix, const Pattern& input,
                                       Subspace subspace, PhotonModel model,
                                       int threads = 1);

// Draw `count` patterns i.i.d. from the distribution; draw k derives its
// randomness from (seed, "sample", k).
std::vector<Pattern> sample_patterns(const PhotonDistribution& dist, int count,
                                     uint64_t seed);

}  // namespace loopsim
