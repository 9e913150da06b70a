#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lshqs/geometry.hpp"
#include "lshqs/kde.hpp"
#include "lshqs/lsh_index.hpp"

namespace lshqs {

/// How the neighbour step finds the parent candidate. `exact_ball` scans
/// the exact c*h ball and exists so the LSH pipeline can be checked against
/// exact_quickshift.
enum class NeighborSearch { lsh, exact_ball };

struct QuickShiftConfig {
  Real bandwidth = 1.0;      // h; also the kernel sigma and the LSH radius
  Real approximation = 1.5;  // c; parent edges are at most c*h long
  Real epsilon = 0.1;
  Real mu = kDefaultMu;
  EstimatorKind estimator = EstimatorKind::hbe;
  std::uint64_t seed = 0;
  std::optional<std::size_t> lsh_tables;
  std::optional<std::size_t> lsh_concat;
  std::optional<Real> bucket_width;
  NeighborSearch neighbor_search = NeighborSearch::lsh;

  void validate() const;
  Real max_edge() const { return approximation * bandwidth; }
  /// LSH parameters for n points in `dim` dimensions: the default sizing
  /// with any overrides applied.
  LshParams lsh_params(std::size_t n, std::size_t dim) const;
};

/// Wall-clock milliseconds per pipeline stage.
struct StageTimings {
  double build_ms = 0.0;
  double kde_ms = 0.0;
  double graph_ms = 0.0;
  double label_ms = 0.0;
  double total_ms() const { return build_ms + kde_ms + graph_ms + label_ms; }
};

/// Directed forest over the dataset: parent[i] is empty for a root.
struct QuickShiftForest {
  std::vector<std::optional<PointId>> parent;
  DensityEstimate densities;
  QuickShiftConfig config;
  std::optional<LshParams> lsh;  // set when an index was built
  Real max_edge = 0.0;           // c*h, or tau for exact_quickshift
  StageTimings timings;

  std::size_t size() const { return parent.size(); }
};

/// True when j outranks i: higher density, or equal density and lower id.
inline bool outranks(std::span<const Real> density, PointId j, PointId i) {
  return density[j] > density[i] || (density[j] == density[i] && j < i);
}

/// LSH Quick Shift. Builds the index at radius h, estimates densities with
/// the configured estimator, caches per-bucket density maxima and links
/// each point to the best surviving candidate when that candidate outranks
/// it.
QuickShiftForest lsh_quickshift(const Dataset& data, const QuickShiftConfig& cfg);

/// Quadratic reference: exact KDE with sigma = h and parent = best-ranked
/// point of the exact tau-ball when it outranks the point.
QuickShiftForest exact_quickshift(const Dataset& data, Real bandwidth, Real tau);

struct ClusterLabels {
  std::vector<PointId> label;  // root id reached from each point
  std::size_t num_clusters = 0;
};

/// Follows parent chains with memoisation. Throws InvariantViolation on a
/// cycle or an out-of-range parent.
ClusterLabels extract_labels(const QuickShiftForest& forest);

struct ModeSet {
  std::vector<PointId> ids;
  std::vector<Point> coords;
};

/// All roots in increasing id order.
ModeSet extract_modes(const QuickShiftForest& forest, const Dataset& data);

/// Roots ordered by decreasing density (ties by id), truncated to `count`.
std::vector<PointId> top_modes(const QuickShiftForest& forest, std::size_t count);

/// True iff no point of `region_a` shares a root with a point of
/// `region_b`. The regions must be disjoint.
bool check_separation(const ClusterLabels& labels, std::span<const PointId> region_a,
                      std::span<const PointId> region_b);

/// Exhaustive scan of the forest invariants: no self loops, acyclic, every
/// edge goes to an outranking point, every edge is at most max_edge long.
/// Returns one message per violation.
std::vector<std::string> verify_forest(const Dataset& data, const QuickShiftForest& forest);

}  // namespace lshqs
