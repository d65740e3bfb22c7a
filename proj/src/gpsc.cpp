#include "grl/gpsc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "grl/errors.hpp"

namespace grl {

SimilarityGraph SimilarityGraph::from_particles(
    const std::vector<const ExperienceParticle*>& particles,
    const KernelHyperparameters& h) {
  const Eigen::Index n = static_cast<Eigen::Index>(particles.size());
  if (n == 0) throw PreconditionError("similarity graph: no particles");
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double k =
          kernel_value(particles[static_cast<std::size_t>(i)]->aug,
                       particles[static_cast<std::size_t>(j)]->aug, h, false);
      w(i, j) = k;
      w(j, i) = k;
    }
  }
  return {std::move(w)};
}

SimilarityGraph SimilarityGraph::from_weights(Eigen::MatrixXd w) {
  if (w.rows() == 0 || w.rows() != w.cols())
    throw ConfigError("similarity graph: weights must be square and nonempty");
  if (!w.isApprox(w.transpose(), 1e-12))
    throw ConfigError("similarity graph: weights must be symmetric");
  if ((w.array() < 0.0).any())
    throw ConfigError("similarity graph: weights must be non-negative");
  return {std::move(w)};
}

Eigen::VectorXd degree_matrix(const SimilarityGraph& g) {
  if (g.size() == 0) throw PreconditionError("degree_matrix: empty graph");
  return g.weights.rowwise().sum();
}

Eigen::MatrixXd transition_matrix(const SimilarityGraph& g) {
  const Eigen::VectorXd d = degree_matrix(g);
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0))
      throw DegenerateGraphError("transition_matrix: vertex " +
                                 std::to_string(i) + " has zero degree");
  return d.cwiseInverse().asDiagonal() * g.weights;
}

SimilarityGraph sparsify(const SimilarityGraph& g, double tau_prime) {
  if (tau_prime < 0.0 || tau_prime >= 1.0)
    throw ConfigError("sparsify: tau_prime must lie in [0, 1)");
  Eigen::MatrixXd w = g.weights;
  const Eigen::Index n = w.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double scale = std::sqrt(w(i, i) * w(j, j));
      if (w(i, j) < tau_prime * scale) {
        w(i, j) = 0.0;
        w(j, i) = 0.0;
      }
    }
  return {std::move(w)};
}

NcutResult ncut_value(const SimilarityGraph& g, const std::vector<int>& labels,
                      int p) {
  const Eigen::Index n = g.weights.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw PreconditionError("ncut_value: label count mismatch");
  for (const int l : labels)
    if (l < 0 || l >= p) throw PreconditionError("ncut_value: label out of range");

  // W(A, B) = 1/2 sum_{i in A, j in B} W_ij.
  std::vector<double> cut(static_cast<std::size_t>(p), 0.0);
  std::vector<double> assoc(static_cast<std::size_t>(p), 0.0);
  std::vector<int> count(static_cast<std::size_t>(p), 0);
  for (const int l : labels) ++count[static_cast<std::size_t>(l)];
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto li = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = 0.5 * g.weights(i, j);
      assoc[li] += w;
      if (labels[static_cast<std::size_t>(j)] != static_cast<int>(li))
        cut[li] += w;
    }
  }
  NcutResult result;
  for (int c = 0; c < p; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    if (count[idx] == 0) {
      result.has_empty_cluster = true;
      continue;  // empty cluster contributes 0 by convention
    }
    if (assoc[idx] > 0.0) result.value += cut[idx] / assoc[idx];
  }
  return result;
}

namespace {

struct KmeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Eigen::MatrixXd& points, int k, Rng& rng,
                      int max_iters) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();

  // k-means++ seeding.
  Eigen::MatrixXd centers(k, d);
  std::vector<double> dist2(static_cast<std::size_t>(n),
                            std::numeric_limits<double>::infinity());
  centers.row(0) = points.row(rng.uniform_int(static_cast<int>(n)));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d2 =
          (points.row(i) - centers.row(c - 1)).squaredNorm();
      auto& best = dist2[static_cast<std::size_t>(i)];
      best = std::min(best, d2);
      total += best;
    }
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        r -= dist2[static_cast<std::size_t>(i)];
        if (r <= 0.0) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = rng.uniform_int(static_cast<int>(n));
    }
    centers.row(c) = points.row(pick);
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d2 = (points.row(i) - centers.row(c)).squaredNorm();
        if (d2 < best_d) {
          best_d = d2;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        moved = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
    if (!moved) break;
  }

  KmeansRun run;
  run.labels = std::move(labels);
  run.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    run.inertia +=
        (points.row(i) - centers.row(run.labels[static_cast<std::size_t>(i)]))
            .squaredNorm();
  return run;
}

KmeansRun kmeans(const Eigen::MatrixXd& points, int k, Rng& rng,
                 int restarts = 10, int max_iters = 100) {
  KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = kmeans_once(points, k, rng, max_iters);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

}  // namespace

Partitioning spectral_partition(const SimilarityGraph& g, int p, Rng& rng) {
  const Eigen::Index n = g.weights.rows();
  if (p < 2) throw PreconditionError("spectral_partition: p must be >= 2");
  if (p > n)
    throw PreconditionError("spectral_partition: p exceeds vertex count");
  const Eigen::VectorXd d = degree_matrix(g);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(d[i] > 0.0))
      throw DegenerateGraphError("spectral_partition: zero-degree vertex");

  // L_sym = D^-1/2 (D - W) D^-1/2 shares the random-walk Laplacian's
  // spectrum; its eigenvectors map back through D^-1/2.
  const Eigen::VectorXd dinv_sqrt = d.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd lsym =
      -(dinv_sqrt.asDiagonal() * g.weights * dinv_sqrt.asDiagonal());
  lsym.diagonal().array() += 1.0;
  lsym = 0.5 * (lsym + lsym.transpose());  // enforce exact symmetry

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lsym);
  if (eig.info() != Eigen::Success)
    throw NumericalError("spectral_partition: eigensolver failed");

  Eigen::MatrixXd embedding = eig.eigenvectors().leftCols(p);
  for (Eigen::Index i = 0; i < n; ++i) embedding.row(i) *= dinv_sqrt[i];

  Partitioning part;
  part.p = p;
  part.labels = kmeans(embedding, p, rng).labels;
  part.ncut = ncut_value(g, part.labels, p).value;
  return part;
}

std::vector<int> reindex_clusters(const std::vector<int>& old_labels,
                                  const std::vector<int>& new_labels, int p) {
  if (old_labels.size() != new_labels.size())
    throw PreconditionError("reindex_clusters: label vectors differ in length");

  // Overlap counts between each new cluster and each old index.
  std::vector<std::vector<int>> overlap(
      static_cast<std::size_t>(p), std::vector<int>(static_cast<std::size_t>(p), 0));
  for (std::size_t i = 0; i < new_labels.size(); ++i) {
    const int o = old_labels[i];
    const int m = new_labels[i];
    if (o < 0 || o >= p || m < 0 || m >= p)
      throw PreconditionError("reindex_clusters: label out of range");
    ++overlap[static_cast<std::size_t>(m)][static_cast<std::size_t>(o)];
  }

  struct Claim {
    int count;
    int old_index;
    int new_index;
  };
  std::vector<Claim> claims;
  for (int m = 0; m < p; ++m) {
    int best_old = -1;
    int best_count = 0;
    for (int o = 0; o < p; ++o) {
      const int c = overlap[static_cast<std::size_t>(m)][static_cast<std::size_t>(o)];
      if (c > best_count) {
        best_count = c;
        best_old = o;
      }
    }
    if (best_old >= 0) claims.push_back({best_count, best_old, m});
  }
  std::stable_sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.new_index < b.new_index;
  });

  std::vector<int> mapping(static_cast<std::size_t>(p), -1);
  std::vector<bool> taken(static_cast<std::size_t>(p), false);
  for (const Claim& c : claims) {
    if (!taken[static_cast<std::size_t>(c.old_index)] &&
        mapping[static_cast<std::size_t>(c.new_index)] < 0) {
      mapping[static_cast<std::size_t>(c.new_index)] = c.old_index;
      taken[static_cast<std::size_t>(c.old_index)] = true;
    }
  }
  // Losing and empty new clusters take the unclaimed old indices in order.
  int next_free = 0;
  for (int m = 0; m < p; ++m) {
    if (mapping[static_cast<std::size_t>(m)] >= 0) continue;
    while (taken[static_cast<std::size_t>(next_free)]) ++next_free;
    mapping[static_cast<std::size_t>(m)] = next_free;
    taken[static_cast<std::size_t>(next_free)] = true;
  }

  std::vector<int> relabeled(new_labels.size());
  for (std::size_t i = 0; i < new_labels.size(); ++i)
    relabeled[i] = mapping[static_cast<std::size_t>(new_labels[i])];
  return relabeled;
}

}  // namespace grl
