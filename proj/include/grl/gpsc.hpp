#ifndef GRL_GPSC_HPP
#define GRL_GPSC_HPP

#include <Eigen/Dense>
#include <vector>

#include "grl/kernels.hpp"
#include "grl/particle_memory.hpp"
#include "grl/rng.hpp"

namespace grl {

// The GPR covariance matrix reinterpreted as a fully connected similarity
// graph over particles.  Weights use the noise-free kernel: the
// observational-noise diagonal is a regression artifact, not similarity.
struct SimilarityGraph {
  Eigen::MatrixXd weights;  // symmetric, non-negative

  static SimilarityGraph from_particles(
      const std::vector<const ExperienceParticle*>& particles,
      const KernelHyperparameters& h);
  static SimilarityGraph from_weights(Eigen::MatrixXd w);  // validates

  int size() const { return static_cast<int>(weights.rows()); }
};

// d_i = sum_j W_ij (self-weight included).
Eigen::VectorXd degree_matrix(const SimilarityGraph& g);

// Row-stochastic P = D^-1 W.  Throws DegenerateGraphError on a zero degree.
Eigen::MatrixXd transition_matrix(const SimilarityGraph& g);

// Zeroes off-diagonal edges whose normalized similarity
// W_ij / sqrt(W_ii W_jj) falls below tau_prime; diagonal preserved.
SimilarityGraph sparsify(const SimilarityGraph& g, double tau_prime);

struct NcutResult {
  double value = 0.0;
  bool has_empty_cluster = false;
};

// p-way normalized cut sum_i W(C_i, complement) / W(C_i, all) with each link
// weight halved consistently in numerator and denominator; an empty cluster
// contributes 0.
NcutResult ncut_value(const SimilarityGraph& g, const std::vector<int>& labels,
                      int p);

struct Partitioning {
  std::vector<int> labels;  // one entry per vertex, in {0..p-1}
  int p = 0;
  double ncut = 0.0;
};

// Relaxed normalized-cut solution: eigenvectors of the symmetric surrogate
// D^-1/2 (D - W) D^-1/2 rescaled by D^-1/2 (the random-walk Laplacian
// spectrum), embedded rows clustered by k-means++ with restarts.
Partitioning spectral_partition(const SimilarityGraph& g, int p, Rng& rng);

// Majority-vote relabeling: each new cluster takes the old index held by
// most of its surviving members; conflicts go to the larger overlap (ties to
// the lower new index) and losers take unclaimed old indices in order.
// Returns new_labels rewritten through that mapping.
std::vector<int> reindex_clusters(const std::vector<int>& old_labels,
                                  const std::vector<int>& new_labels, int p);

}  // namespace grl

#endif
