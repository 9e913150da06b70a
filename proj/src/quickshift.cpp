#include "lshqs/quickshift.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace lshqs {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Best-ranked point of the exact ball around i, excluding i itself.
std::optional<PointId> exact_ball_argmax(const Dataset& data, std::span<const Real> density, PointId i, Real radius) {
  const Real limit = radius * radius;
  const auto xi = data.point(i);
  std::optional<PointId> best;
  for (PointId j = 0; j < data.size(); ++j) {
    if (j == i) continue;
    if (squared_euclidean(xi, data.point(j)) > limit) continue;
    if (!best || outranks(density, j, *best)) best = j;
  }
  return best;
}

}  // namespace

void QuickShiftConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw std::invalid_argument("bandwidth must be > 0");
  if (!(approximation > 1.0) || !std::isfinite(approximation)) throw std::invalid_argument("c must be > 1");
  if (estimator == EstimatorKind::hbe) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("mu must lie in (0,1)");
  }
  if (lsh_tables && *lsh_tables == 0) throw std::invalid_argument("lsh tables must be >= 1");
  if (lsh_concat && *lsh_concat == 0) throw std::invalid_argument("lsh concat must be >= 1");
  if (bucket_width && !(*bucket_width > 0.0)) throw std::invalid_argument("bucket width must be > 0");
}

LshParams QuickShiftConfig::lsh_params(std::size_t n, std::size_t dim) const {
  const std::uint64_t lsh_seed = derive_seed(SeedSpec{seed}, "lsh", 0);
  LshParams params = LshParams::sized_for(n, dim, bandwidth, approximation, lsh_seed);
  if (bucket_width) params.bucket_width = *bucket_width;
  if (lsh_concat) params.concat = *lsh_concat;
  if (lsh_concat || bucket_width) {
    // re-derive L for the overridden shape unless it is given as well
    const Real p = std::pow(collision_probability(bandwidth, params.bucket_width), static_cast<Real>(params.concat));
    params.tables = std::clamp(tables_for_miss_probability(p, 0.1), LshParams::kMinTables, LshParams::kMaxTables);
  }
  if (lsh_tables) params.tables = *lsh_tables;
  return params;
}

QuickShiftForest lsh_quickshift(const Dataset& data, const QuickShiftConfig& cfg) {
  cfg.validate();
  const std::size_t n = data.size();
  QuickShiftForest forest;
  forest.config = cfg;
  forest.max_edge = cfg.max_edge();
  forest.parent.assign(n, std::nullopt);

  auto start = Clock::now();
  std::optional<LshIndex> index;
  if (cfg.neighbor_search == NeighborSearch::lsh) {
    forest.lsh = cfg.lsh_params(n, data.dim());
    index.emplace(LshIndex::build(data, *forest.lsh));
  }
  forest.timings.build_ms = elapsed_ms(start);

  start = Clock::now();
  forest.densities = estimate_all(data, KernelSpec{cfg.bandwidth}, cfg.estimator, cfg.epsilon, cfg.mu,
                                  derive_seed(SeedSpec{cfg.seed}, "kde", 0));
  forest.timings.kde_ms = elapsed_ms(start);

  start = Clock::now();
  const std::span<const Real> density = forest.densities.values;
  if (index) index->register_densities(density);
  for (PointId i = 0; i < n; ++i) {
    const std::optional<PointId> candidate =
        index ? index->argmax_density_neighbor(i) : exact_ball_argmax(data, density, i, cfg.max_edge());
    if (candidate && outranks(density, *candidate, i)) forest.parent[i] = *candidate;
  }
  forest.timings.graph_ms = elapsed_ms(start);
  return forest;
}

QuickShiftForest exact_quickshift(const Dataset& data, Real bandwidth, Real tau) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("exact_quickshift: bandwidth must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("exact_quickshift: tau must be > 0");
  const std::size_t n = data.size();
  QuickShiftForest forest;
  forest.config.bandwidth = bandwidth;
  forest.config.estimator = EstimatorKind::exact;
  forest.config.neighbor_search = NeighborSearch::exact_ball;
  forest.max_edge = tau;
  forest.parent.assign(n, std::nullopt);

  auto start = Clock::now();
  forest.densities = estimate_all(data, KernelSpec{bandwidth}, EstimatorKind::exact, 0.0, 0.0, 0);
  forest.timings.kde_ms = elapsed_ms(start);

  start = Clock::now();
  const auto& f = forest.densities.values;
  const Real limit = tau * tau;
  for (PointId i = 0; i < n; ++i) {
    const auto xi = data.point(i);
    std::optional<PointId> best;
    for (PointId j = 0; j < n; ++j) {
      if (j == i || squared_euclidean(xi, data.point(j)) > limit) continue;
      if (!best || f[j] > f[*best] || (f[j] == f[*best] && j < *best)) best = j;
    }
    if (best && (f[*best] > f[i] || (f[*best] == f[i] && *best < i))) forest.parent[i] = *best;
  }
  forest.timings.graph_ms = elapsed_ms(start);
  return forest;
}

ClusterLabels extract_labels(const QuickShiftForest& forest) {
  const std::size_t n = forest.size();
  constexpr PointId kUnset = static_cast<PointId>(-1);
  ClusterLabels out;
  out.label.assign(n, kUnset);
  std::vector<char> on_path(n, 0);
  std::vector<PointId> path;
  for (PointId start = 0; start < n; ++start) {
    if (out.label[start] != kUnset) continue;
    path.clear();
    PointId cur = start;
    PointId root = kUnset;
    while (true) {
      if (out.label[cur] != kUnset) {
        root = out.label[cur];
        break;
      }
      if (on_path[cur]) throw InvariantViolation("extract_labels: cycle through point " + std::to_string(cur));
      on_path[cur] = 1;
      path.push_back(cur);
      const auto& next = forest.parent[cur];
      if (!next) {
        root = cur;
        break;
      }
      if (*next >= n) throw InvariantViolation("extract_labels: parent out of range at point " + std::to_string(cur));
      cur = *next;
    }
    for (PointId p : path) {
      out.label[p] = root;
      on_path[p] = 0;
    }
  }
  for (PointId i = 0; i < n; ++i) {
    if (!forest.parent[i]) ++out.num_clusters;
  }
  return out;
}

ModeSet extract_modes(const QuickShiftForest& forest, const Dataset& data) {
  ModeSet modes;
  for (PointId i = 0; i < forest.size(); ++i) {
    if (forest.parent[i]) continue;
    modes.ids.push_back(i);
    modes.coords.push_back(data.point_copy(i));
  }
  return modes;
}

std::vector<PointId> top_modes(const QuickShiftForest& forest, std::size_t count) {
  std::vector<PointId> roots;
  for (PointId i = 0; i < forest.size(); ++i) {
    if (!forest.parent[i]) roots.push_back(i);
  }
  const std::span<const Real> f = forest.densities.values;
  std::sort(roots.begin(), roots.end(), [&](PointId a, PointId b) { return outranks(f, a, b); });
  if (roots.size() > count) roots.resize(count);
  return roots;
}

bool check_separation(const ClusterLabels& labels, std::span<const PointId> region_a,
                      std::span<const PointId> region_b) {
  std::vector<PointId> a(region_a.begin(), region_a.end());
  std::vector<PointId> b(region_b.begin(), region_b.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<PointId> overlap;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(overlap));
  if (!overlap.empty()) throw std::invalid_argument("check_separation: regions overlap");

  std::vector<PointId> roots_a;
  for (PointId i : a) roots_a.push_back(labels.label.at(i));
  std::sort(roots_a.begin(), roots_a.end());
  for (PointId j : b) {
    if (std::binary_search(roots_a.begin(), roots_a.end(), labels.label.at(j))) return false;
  }
  return true;
}

std::vector<std::string> verify_forest(const Dataset& data, const QuickShiftForest& forest) {
  std::vector<std::string> problems;
  const std::size_t n = forest.size();
  if (n != data.size()) {
    problems.push_back("forest size differs from dataset size");
    return problems;
  }
  const std::span<const Real> f = forest.densities.values;
  if (f.size() != n) problems.push_back("density count differs from dataset size");
  const Real limit = forest.max_edge * forest.max_edge;
  for (PointId i = 0; i < n; ++i) {
    if (!forest.parent[i]) continue;
    const PointId j = *forest.parent[i];
    const std::string edge = std::to_string(i) + " -> " + std::to_string(j);
    if (j >= n) {
      problems.push_back("parent out of range: " + edge);
      continue;
    }
    if (j == i) problems.push_back("self loop at " + std::to_string(i));
    if (f.size() == n && !outranks(f, j, i)) problems.push_back("edge does not increase density: " + edge);
    if (squared_euclidean(data.point(i), data.point(j)) > limit) problems.push_back("edge longer than limit: " + edge);
  }
  // acyclicity
  std::vector<char> state(n, 0);  // 0 unseen, 1 on the current walk, 2 known to reach a root
  std::vector<PointId> walk;
  for (PointId start = 0; start < n; ++start) {
    walk.clear();
    PointId cur = start;
    while (true) {
      if (state[cur] == 2) break;
      if (state[cur] == 1) {
        problems.push_back("cycle through " + std::to_string(cur));
        break;
      }
      state[cur] = 1;
      walk.push_back(cur);
      if (!forest.parent[cur] || *forest.parent[cur] >= n) break;
      cur = *forest.parent[cur];
    }
    for (PointId p : walk) state[p] = 2;
  }
  return problems;
}

}  // namespace lshqs
