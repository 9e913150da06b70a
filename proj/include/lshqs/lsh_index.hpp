#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "lshqs/geometry.hpp"

namespace lshqs {

/// Probability that one p-stable (Gaussian) hash floor((a.x + b) / w) puts
/// two points at distance `dist` in the same slot. Equal to 1 at distance 0
/// and strictly decreasing. Throws on negative distance or w <= 0.
Real collision_probability(Real dist, Real w);

/// K concatenated p-stable projections folded into one 64-bit bucket key.
class PStableHash {
 public:
  PStableHash(std::size_t dim, std::size_t concat, Real width, std::uint64_t seed);

  std::uint64_t key(std::span<const Real> x) const;
  /// Collision probability of the full K-tuple at distance `dist`.
  Real collision_probability(Real dist) const;

  std::size_t dim() const { return dim_; }
  std::size_t concat() const { return concat_; }
  Real width() const { return width_; }
  /// K x d projection directions, row-major.
  std::span<const Real> directions() const { return directions_; }
  std::span<const Real> offsets() const { return offsets_; }

 private:
  std::size_t dim_;
  std::size_t concat_;
  Real width_;
  std::vector<Real> directions_;
  std::vector<Real> offsets_;
  // d x K transpose of directions / w, and offsets / w, for key()
  std::vector<Real> scaled_directions_;
  std::vector<Real> scaled_offsets_;
};

struct LshParams {
  Real radius = 1.0;         // r
  Real approximation = 1.5;  // c
  std::size_t tables = 1;    // L
  std::size_t concat = 1;    // K
  Real bucket_width = 1.0;   // w
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless r > 0, c > 1, L >= 1, K >= 1, w > 0.
  void validate() const;

  /// Default sizing for n points in `dim` dimensions: w = 2r,
  /// K = min(d + 1, round(log2 n)) so buckets are bounded in every
  /// direction, and L is the smallest count for which an r-near pair is
  /// missed by every table with probability <= 0.1, clamped to
  /// [kMinTables, kMaxTables].
  static LshParams sized_for(std::size_t n, std::size_t dim, Real radius, Real approximation, std::uint64_t seed);

  static constexpr Real kWidthPerRadius = 2.0;
  static constexpr std::size_t kMinTables = 100;
  static constexpr std::size_t kMaxTables = 512;
};

/// Tables needed so that a pair colliding with per-table probability
/// `p_table` is missed everywhere with probability <= `miss`.
std::size_t tables_for_miss_probability(Real p_table, Real miss);

/// Euclidean LSH index over a Dataset answering (k, c, r)-ANNS queries and
/// the density-argmax-over-neighbours query used by Quick Shift.
///
/// Each of the L tables maps a K-tuple key to a bucket. Bucket ids are
/// assigned in order of first appearance by point id and members are
/// stored in increasing id order, so the structure is a pure function of
/// (data, params).
class LshIndex {
 public:
  static LshIndex build(const Dataset& data, const LshParams& params);

  const LshParams& params() const { return params_; }
  const Dataset& data() const { return data_; }
  std::size_t num_tables() const { return tables_.size(); }

  /// Up to k ids within c*r of q, ordered by (distance, id).
  std::vector<PointId> query_ann(std::span<const Real> q, std::size_t k) const;

  /// Caches, per non-empty bucket, the member with the highest density
  /// (ties to the lowest id). Throws on a length mismatch or non-finite
  /// value.
  void register_densities(std::span<const Real> densities);
  bool has_densities() const { return !densities_.empty(); }

  /// Highest-density point among the L cached bucket maxima of point i's
  /// buckets, excluding i and anything farther than c*r. Ties go to the
  /// lowest id. Throws std::logic_error before register_densities.
  std::optional<PointId> argmax_density_neighbor(PointId i) const;

  // Structure inspection.
  std::size_t num_buckets(std::size_t table) const { return tables_[table].keys.size(); }
  std::uint64_t bucket_key(std::size_t table, std::size_t bucket) const { return tables_[table].keys[bucket]; }
  std::size_t bucket_of(std::size_t table, PointId i) const { return tables_[table].point_bucket[i]; }
  std::span<const PointId> bucket_members(std::size_t table, std::size_t bucket) const;
  std::optional<PointId> bucket_argmax(std::size_t table, std::size_t bucket) const;
  const PStableHash& hash(std::size_t table) const { return tables_[table].hash; }

 private:
  struct Table {
    PStableHash hash;
    std::vector<std::uint64_t> keys;             // per bucket
    std::vector<std::size_t> offsets;            // CSR, size buckets + 1
    std::vector<PointId> members;                // CSR payload
    std::vector<std::size_t> point_bucket;       // per point
    std::unordered_map<std::uint64_t, std::size_t> lookup;
    std::vector<PointId> argmax;                 // per bucket, valid after registration
  };

  LshIndex(Dataset data, LshParams params) : data_(std::move(data)), params_(params) {}
  bool within_filter(std::span<const Real> q, PointId j) const;

  Dataset data_;
  LshParams params_;
  std::vector<Table> tables_;
  std::vector<Real> densities_;
};

}  // namespace lshqs
