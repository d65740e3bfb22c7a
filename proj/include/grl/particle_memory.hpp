#ifndef GRL_PARTICLE_MEMORY_HPP
#define GRL_PARTICLE_MEMORY_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "grl/gpr.hpp"
#include "grl/kernels.hpp"

namespace grl {

// One unit of working memory: an augmented state, its fitness estimate, and
// the temporal difference at creation time.  Polarity is derived from the
// sign of the TD and never stored separately.
struct ExperienceParticle {
  AugmentedState aug;
  double fitness = 0.0;
  double td = 0.0;
  int partition_id = -1;
  int cluster_id = -1;  // -1 = not clustered
  long birth_step = 0;

  bool positive() const { return td >= 0.0; }
};

// Axis-aligned grid over the state space.  Cells are half-open: a point on
// an interior boundary belongs to the cell with the larger coordinate, and
// points outside the bounds clamp to the boundary cell.
struct GridGeometry {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<int> cells;  // per-axis cell counts

  int dims() const { return static_cast<int>(cells.size()); }
  int cell_count() const;
  int partition_of(const Eigen::VectorXd& state_vec) const;
  std::vector<int> cell_coords(int flat_index) const;
  int flat_index(const std::vector<int>& coords) const;
  // Geometric center of a cell (used by plots and tests).
  Eigen::VectorXd cell_center(int flat_index) const;
  double cell_width(int axis) const;
  void validate() const;  // throws ConfigError
};

struct MemoryConfig {
  GridGeometry geometry;
  int quota_pos = 3;  // positive particles per cell
  int quota_neg = 3;  // negative particles per cell

  int capacity() const {
    return geometry.cell_count() * (quota_pos + quota_neg);
  }
  void validate() const;
};

// Hypothetical state: the donor particle's action grafted onto a query state.
AugmentedState make_hypothetical(const Eigen::VectorXd& state_vec,
                                 const ExperienceParticle& donor);

struct AssociationMatch {
  const ExperienceParticle* particle;
  double correlation;
};

// Particles whose correlation with the query reaches tau, ranked by
// descending correlation; exact ties break by ascending birth step.  An
// empty result signals an out-of-context query.
std::vector<AssociationMatch> associate(
    const AugmentedState& query,
    const std::vector<const ExperienceParticle*>& candidates,
    const KernelHyperparameters& h, double tau);

// Grid-partitioned working memory with per-polarity quotas and the
// TD-guided replacement rule.  Single writer; snapshots are copies.
class WorkingMemory {
 public:
  explicit WorkingMemory(MemoryConfig cfg);

  // Inserts p while its cell has quota room for its polarity; otherwise
  // scans the cell's same-polarity particles in descending correlation
  // (>= tau only) and replaces the first one the reinforcement rule allows:
  // a smaller fitness for positive p, a larger fitness for negative p.
  // Returns whether the memory changed.
  bool update(ExperienceParticle p, const KernelHyperparameters& h, double tau);

  // Particles of the cell containing state_vec (that cell only).
  std::vector<const ExperienceParticle*> local_candidates(
      const Eigen::VectorXd& state_vec) const;

  std::vector<const ExperienceParticle*> particles() const;
  std::vector<ExperienceParticle*> particles_mutable();

  // Deterministic copy: cells in index order, slots in storage order.
  std::vector<ExperienceParticle> snapshot() const;
  TrainingSet training_set() const;

  int size() const { return size_; }
  int capacity() const { return cfg_.capacity(); }
  const MemoryConfig& config() const { return cfg_; }

 private:
  MemoryConfig cfg_;
  std::vector<std::vector<ExperienceParticle>> cells_;
  int size_ = 0;
};

// Line-oriented snapshot format: one particle per record holding the joint
// vector, fitness, td, partition, cluster, and birth step.
void save_particles(std::ostream& os,
                    const std::vector<ExperienceParticle>& particles,
                    int state_dim, int action_dim);
std::vector<ExperienceParticle> load_particles(std::istream& is, int& state_dim,
                                               int& action_dim);

}  // namespace grl

#endif
