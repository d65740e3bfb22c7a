#include "grl/particle_memory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "grl/errors.hpp"

namespace grl {

void GridGeometry::validate() const {
  if (cells.empty()) throw ConfigError("grid: needs at least one axis");
  if (lo.size() != dims() || hi.size() != dims())
    throw ConfigError("grid: bounds must match axis count");
  for (int a = 0; a < dims(); ++a) {
    if (cells[static_cast<std::size_t>(a)] <= 0)
      throw ConfigError("grid: cell counts must be positive");
    if (!(lo[a] < hi[a])) throw ConfigError("grid: lo must be < hi per axis");
  }
}

int GridGeometry::cell_count() const {
  int n = 1;
  for (const int c : cells) n *= c;
  return n;
}

double GridGeometry::cell_width(int axis) const {
  return (hi[axis] - lo[axis]) / cells[static_cast<std::size_t>(axis)];
}

int GridGeometry::partition_of(const Eigen::VectorXd& state_vec) const {
  if (state_vec.size() != dims())
    throw ConfigError("grid: state dimension mismatch");
  int index = 0;
  int stride = 1;
  for (int a = 0; a < dims(); ++a) {
    const int n = cells[static_cast<std::size_t>(a)];
    int c = static_cast<int>(std::floor((state_vec[a] - lo[a]) / cell_width(a)));
    c = std::clamp(c, 0, n - 1);
    index += c * stride;
    stride *= n;
  }
  return index;
}

std::vector<int> GridGeometry::cell_coords(int flat_index) const {
  std::vector<int> coords(static_cast<std::size_t>(dims()));
  for (int a = 0; a < dims(); ++a) {
    const int n = cells[static_cast<std::size_t>(a)];
    coords[static_cast<std::size_t>(a)] = flat_index % n;
    flat_index /= n;
  }
  return coords;
}

int GridGeometry::flat_index(const std::vector<int>& coords) const {
  int index = 0;
  int stride = 1;
  for (int a = 0; a < dims(); ++a) {
    index += coords[static_cast<std::size_t>(a)] * stride;
    stride *= cells[static_cast<std::size_t>(a)];
  }
  return index;
}

Eigen::VectorXd GridGeometry::cell_center(int flat_index) const {
  const std::vector<int> coords = cell_coords(flat_index);
  Eigen::VectorXd center(dims());
  for (int a = 0; a < dims(); ++a)
    center[a] = lo[a] + (coords[static_cast<std::size_t>(a)] + 0.5) * cell_width(a);
  return center;
}

void MemoryConfig::validate() const {
  geometry.validate();
  if (quota_pos < 0 || quota_neg < 0 || quota_pos + quota_neg == 0)
    throw ConfigError("memory: per-cell quotas must be non-negative and not both zero");
}

AugmentedState make_hypothetical(const Eigen::VectorXd& state_vec,
                                 const ExperienceParticle& donor) {
  return AugmentedState(state_vec, donor.aug.action_vec);
}

std::vector<AssociationMatch> associate(
    const AugmentedState& query,
    const std::vector<const ExperienceParticle*>& candidates,
    const KernelHyperparameters& h, double tau) {
  std::vector<AssociationMatch> matches;
  for (const ExperienceParticle* p : candidates) {
    const double c = correlation(query, p->aug, h);
    if (c >= tau) matches.push_back({p, c});
  }
  std::stable_sort(matches.begin(), matches.end(),
                   [](const AssociationMatch& a, const AssociationMatch& b) {
                     if (a.correlation != b.correlation)
                       return a.correlation > b.correlation;
                     return a.particle->birth_step < b.particle->birth_step;
                   });
  return matches;
}

WorkingMemory::WorkingMemory(MemoryConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  cells_.resize(static_cast<std::size_t>(cfg_.geometry.cell_count()));
}

bool WorkingMemory::update(ExperienceParticle p, const KernelHyperparameters& h,
                           double tau) {
  if (!std::isfinite(p.fitness) || !std::isfinite(p.td))
    throw PreconditionError("memory update: non-finite fitness or td");
  p.partition_id = cfg_.geometry.partition_of(p.aug.state_vec);
  auto& cell = cells_[static_cast<std::size_t>(p.partition_id)];

  const bool positive = p.positive();
  int same_polarity = 0;
  for (const auto& w : cell)
    if (w.positive() == positive) ++same_polarity;

  // The replacement rule alone can never populate an empty memory, so
  // insertion happens freely while the polarity quota has room.
  const int quota = positive ? cfg_.quota_pos : cfg_.quota_neg;
  if (same_polarity < quota) {
    if (quota == 0) return false;
    cell.push_back(std::move(p));
    ++size_;
    return true;
  }

  // Rank correlated, polarity-aligned residents by descending correlation
  // (ties to the oldest) and replace the first one losing to p's fitness.
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (cell[i].positive() != positive) continue;
    const double c = correlation(p.aug, cell[i].aug, h);
    if (c >= tau) ranked.emplace_back(c, i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return cell[a.second].birth_step < cell[b.second].birth_step;
                   });
  for (const auto& [corr, idx] : ranked) {
    ExperienceParticle& w = cell[idx];
    const bool replace =
        positive ? (w.fitness < p.fitness) : (w.fitness > p.fitness);
    if (replace) {
      w = std::move(p);
      return true;
    }
  }
  return false;
}

std::vector<const ExperienceParticle*> WorkingMemory::local_candidates(
    const Eigen::VectorXd& state_vec) const {
  const int cell = cfg_.geometry.partition_of(state_vec);
  std::vector<const ExperienceParticle*> out;
  for (const auto& p : cells_[static_cast<std::size_t>(cell)])
    out.push_back(&p);
  return out;
}

std::vector<const ExperienceParticle*> WorkingMemory::particles() const {
  std::vector<const ExperienceParticle*> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (const auto& cell : cells_)
    for (const auto& p : cell) out.push_back(&p);
  return out;
}

std::vector<ExperienceParticle*> WorkingMemory::particles_mutable() {
  std::vector<ExperienceParticle*> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (auto& cell : cells_)
    for (auto& p : cell) out.push_back(&p);
  return out;
}

std::vector<ExperienceParticle> WorkingMemory::snapshot() const {
  std::vector<ExperienceParticle> out;
  out.reserve(static_cast<std::size_t>(size_));
  for (const auto& cell : cells_)
    for (const auto& p : cell) out.push_back(p);
  return out;
}

TrainingSet WorkingMemory::training_set() const {
  TrainingSet out;
  out.reserve(static_cast<std::size_t>(size_));
  for (const auto& cell : cells_)
    for (const auto& p : cell) out.emplace_back(p.aug, p.fitness);
  return out;
}

void save_particles(std::ostream& os,
                    const std::vector<ExperienceParticle>& particles,
                    int state_dim, int action_dim) {
  os << "# grl particles state_dim=" << state_dim
     << " action_dim=" << action_dim << "\n";
  char buf[32];
  const auto emit = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& p : particles) {
    for (Eigen::Index i = 0; i < p.aug.state_vec.size(); ++i) {
      emit(p.aug.state_vec[i]);
      os << ' ';
    }
    for (Eigen::Index i = 0; i < p.aug.action_vec.size(); ++i) {
      emit(p.aug.action_vec[i]);
      os << ' ';
    }
    emit(p.fitness);
    os << ' ';
    emit(p.td);
    os << ' ' << p.partition_id << ' ' << p.cluster_id << ' ' << p.birth_step
       << "\n";
  }
}

std::vector<ExperienceParticle> load_particles(std::istream& is, int& state_dim,
                                               int& action_dim) {
  std::string header;
  if (!std::getline(is, header))
    throw ConfigError("particle snapshot: empty stream");
  const auto sd = header.find("state_dim=");
  const auto ad = header.find("action_dim=");
  if (header.rfind("# grl particles", 0) != 0 || sd == std::string::npos ||
      ad == std::string::npos)
    throw ConfigError("particle snapshot: bad header");
  state_dim = std::stoi(header.substr(sd + 10));
  action_dim = std::stoi(header.substr(ad + 11));

  std::vector<ExperienceParticle> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ExperienceParticle p;
    p.aug.state_vec.resize(state_dim);
    p.aug.action_vec.resize(action_dim);
    for (int i = 0; i < state_dim; ++i) ls >> p.aug.state_vec[i];
    for (int i = 0; i < action_dim; ++i) ls >> p.aug.action_vec[i];
    ls >> p.fitness >> p.td >> p.partition_id >> p.cluster_id >> p.birth_step;
    if (!ls) throw ConfigError("particle snapshot: malformed record");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace grl
