#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lshqs/geometry.hpp"
#include "lshqs/lsh_index.hpp"

namespace lshqs {

/// Gaussian kernel exp(-|x - y|^2 / sigma^2).
struct KernelSpec {
  Real sigma = 1.0;
  void validate() const;
};

Real gaussian_kernel(std::span<const Real> x, std::span<const Real> y, const KernelSpec& spec);

/// (1/n) * sum over the dataset of the kernel at q.
Real exact_kde(const Dataset& data, std::span<const Real> q, const KernelSpec& spec);

enum class EstimatorKind { exact, hbe };

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);

/// Repetition counts for the median-of-means estimator.
struct HbeRepetitions {
  std::size_t means = 1;    // m, samples averaged per group
  std::size_t medians = 9;  // t, groups; odd

  /// m = ceil(3 / (eps^2 sqrt(mu))) capped at n, t = 9.
  static HbeRepetitions sized_for(Real epsilon, Real mu, std::size_t n);
  std::size_t total() const { return means * medians; }
};

inline constexpr Real kDefaultMu = 0.05;
inline constexpr Real kHbeWidthPerSigma = 4.0;

/// Groups points by bucket key in linear time. Buckets are numbered in
/// order of first appearance and members of a bucket ascend by id. The
/// scratch hash table is reused across calls.
class KeyGrouper {
 public:
  void group(std::span<const std::uint64_t> keys);

  std::size_t num_buckets() const { return bucket_keys_.size(); }
  std::span<const std::uint64_t> bucket_keys() const { return bucket_keys_; }
  std::span<const std::uint32_t> offsets() const { return offsets_; }
  std::span<const std::uint32_t> members() const { return members_; }
  std::span<const std::uint32_t> point_bucket() const { return point_bucket_; }

 private:
  std::vector<std::uint64_t> slot_key_;
  std::vector<std::uint32_t> slot_bucket_;
  std::vector<std::uint32_t> slot_stamp_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint64_t> bucket_keys_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> members_;
  std::vector<std::uint32_t> point_bucket_;
};

/// One stored hash partition of the dataset. Buckets are kept sorted by
/// key for lookup; members of a bucket ascend by id.
class HbeTable {
 public:
  HbeTable(const Dataset& data, PStableHash hash, KeyGrouper& scratch);

  const PStableHash& hash() const { return hash_; }
  std::size_t num_buckets() const { return keys_.size(); }
  std::span<const std::uint64_t> keys() const { return keys_; }
  std::span<const std::uint32_t> members(std::size_t bucket) const;
  /// Bucket for an arbitrary key, or num_buckets() when absent.
  std::size_t find(std::uint64_t key) const;

 private:
  PStableHash hash_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> members_;
};

/// Hashing-based estimator of the Gaussian KDE.
///
/// Each of the m*t tables is an independent hash partition of the data
/// (d+1 concatenated p-stable projections, width 4 sigma). A single sample
/// hashes the query, draws y uniformly from the query's bucket and returns
/// (|bucket| / n) * k(q, y) / P[collide at |q - y|], which is an unbiased
/// estimate of the KDE. Empty buckets contribute 0. The result is the median
/// over t groups of the mean of m samples. Queries whose density is below
/// mu carry no relative-error guarantee.
///
/// The draw inside table j is keyed by (stream, j), so an estimate is a pure
/// function of (estimator, query, stream).
class HbeEstimator {
 public:
  static HbeEstimator build(const Dataset& data, const KernelSpec& kernel, Real epsilon, Real mu,
                            std::uint64_t seed);
  static HbeEstimator build(const Dataset& data, const KernelSpec& kernel, Real epsilon, Real mu,
                            HbeRepetitions reps, std::uint64_t seed);

  Real estimate(const Dataset& data, std::span<const Real> q, std::uint64_t stream) const;
  /// Every single-sample estimate, in table order.
  std::vector<Real> samples(const Dataset& data, std::span<const Real> q, std::uint64_t stream) const;

  const KernelSpec& kernel() const { return kernel_; }
  Real epsilon() const { return epsilon_; }
  Real mu() const { return mu_; }
  HbeRepetitions repetitions() const { return reps_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<HbeTable>& tables() const { return tables_; }

  /// Hash function of table j for a given estimator seed and dimension.
  static PStableHash table_hash(std::size_t dim, const KernelSpec& kernel, std::uint64_t seed, std::size_t j);

 private:
  HbeEstimator() = default;

  KernelSpec kernel_;
  Real epsilon_ = 0.1;
  Real mu_ = kDefaultMu;
  HbeRepetitions reps_;
  std::uint64_t seed_ = 0;
  std::vector<HbeTable> tables_;
};

/// Sampling stream used for dataset point i when estimating all densities.
std::uint64_t hbe_point_stream(std::uint64_t seed, PointId i);

/// Single importance-sampling estimate given the query's bucket (empty
/// span when the bucket does not exist). Shared by the stored estimator and
/// the streaming path of estimate_all.
Real hbe_single_sample(const Dataset& data, const PStableHash& hash, std::span<const std::uint32_t> bucket,
                       std::span<const Real> q, const KernelSpec& kernel, std::uint64_t draw_key);

/// Median-of-means over samples laid out group after group.
Real median_of_means(std::span<const Real> samples, HbeRepetitions reps);

struct DensityEstimate {
  std::vector<Real> values;
  EstimatorKind estimator = EstimatorKind::exact;
  Real epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// Densities at every dataset point. Exact mode ignores epsilon and mu.
/// The hbe mode streams over tables one at a time and returns exactly what
/// HbeEstimator::build(...).estimate(x_i, hbe_point_stream(seed, i)) would.
DensityEstimate estimate_all(const Dataset& data, const KernelSpec& kernel, EstimatorKind mode, Real epsilon,
                             Real mu, std::uint64_t seed);

}  // namespace lshqs
