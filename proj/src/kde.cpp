#include "lshqs/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lshqs {

namespace {

constexpr Real kSingularDistance = 1e-12;

void validate_hbe_args(Real epsilon, Real mu) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("hbe: epsilon must lie in (0,1)");
  if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("hbe: mu must lie in (0,1)");
}

std::uint64_t draw_key(std::uint64_t stream, std::size_t table) {
  return mix64(stream ^ mix64(static_cast<std::uint64_t>(table) + 0x51ed270b27a5c3d1ULL));
}

}  // namespace

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("KernelSpec: sigma must be > 0");
}

Real gaussian_kernel(std::span<const Real> x, std::span<const Real> y, const KernelSpec& spec) {
  return std::exp(-squared_euclidean(x, y) / (spec.sigma * spec.sigma));
}

Real exact_kde(const Dataset& data, std::span<const Real> q, const KernelSpec& spec) {
  if (q.size() != data.dim()) throw std::invalid_argument("exact_kde: dimension mismatch");
  const Real inv_s2 = 1.0 / (spec.sigma * spec.sigma);
  Real sum = 0.0;
  for (PointId i = 0; i < data.size(); ++i) sum += std::exp(-squared_euclidean(q, data.point(i)) * inv_s2);
  return sum / static_cast<Real>(data.size());
}

std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::exact ? "exact" : "hbe";
}

EstimatorKind estimator_from_string(std::string_view name) {
  if (name == "exact") return EstimatorKind::exact;
  if (name == "hbe") return EstimatorKind::hbe;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

HbeRepetitions HbeRepetitions::sized_for(Real epsilon, Real mu, std::size_t n) {
  validate_hbe_args(epsilon, mu);
  const Real raw = std::ceil(3.0 / (epsilon * epsilon * std::sqrt(mu)));
  HbeRepetitions reps;
  reps.means = std::max<std::size_t>(1, std::min(static_cast<std::size_t>(raw), n));
  reps.medians = 9;
  return reps;
}

void KeyGrouper::group(std::span<const std::uint64_t> keys) {
  const std::size_t n = keys.size();
  if (n >= std::numeric_limits<std::uint32_t>::max()) throw std::length_error("KeyGrouper: too many points");
  std::size_t capacity = 16;
  while (capacity < 2 * n) capacity *= 2;
  if (slot_key_.size() != capacity) {
    slot_key_.assign(capacity, 0);
    slot_bucket_.assign(capacity, 0);
    slot_stamp_.assign(capacity, 0);
    stamp_ = 0;
  }
  if (++stamp_ == 0) {
    std::fill(slot_stamp_.begin(), slot_stamp_.end(), 0);
    stamp_ = 1;
  }
  const std::size_t mask = capacity - 1;

  bucket_keys_.clear();
  point_bucket_.resize(n);
  std::vector<std::uint32_t>& counts = offsets_;
  counts.clear();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t key = keys[i];
    std::size_t slot = static_cast<std::size_t>(key) & mask;
    while (slot_stamp_[slot] == stamp_ && slot_key_[slot] != key) slot = (slot + 1) & mask;
    if (slot_stamp_[slot] != stamp_) {
      slot_stamp_[slot] = stamp_;
      slot_key_[slot] = key;
      slot_bucket_[slot] = static_cast<std::uint32_t>(bucket_keys_.size());
      bucket_keys_.push_back(key);
      counts.push_back(0);
    }
    point_bucket_[i] = slot_bucket_[slot];
    ++counts[slot_bucket_[slot]];
  }
  // counts -> exclusive prefix sums, then fill members in id order
  std::uint32_t running = 0;
  for (auto& c : counts) {
    const std::uint32_t next = running + c;
    c = running;
    running = next;
  }
  counts.push_back(running);
  members_.resize(n);
  for (std::size_t i = 0; i < n; ++i) members_[offsets_[point_bucket_[i]]++] = static_cast<std::uint32_t>(i);
  // the fill advanced every start to the next bucket's start; shift back
  for (std::size_t b = offsets_.size() - 1; b > 0; --b) offsets_[b] = offsets_[b - 1];
  offsets_[0] = 0;
}

HbeTable::HbeTable(const Dataset& data, PStableHash hash, KeyGrouper& scratch) : hash_(std::move(hash)) {
  const std::size_t n = data.size();
  std::vector<std::uint64_t> keys(n);
  for (PointId i = 0; i < n; ++i) keys[i] = hash_.key(data.point(i));
  scratch.group(keys);

  const std::size_t buckets = scratch.num_buckets();
  std::vector<std::uint32_t> order(buckets);
  std::iota(order.begin(), order.end(), 0u);
  const auto bucket_keys = scratch.bucket_keys();
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return bucket_keys[a] < bucket_keys[b]; });

  const auto src_offsets = scratch.offsets();
  const auto src_members = scratch.members();
  keys_.reserve(buckets);
  offsets_.reserve(buckets + 1);
  members_.reserve(n);
  offsets_.push_back(0);
  for (std::uint32_t b : order) {
    keys_.push_back(bucket_keys[b]);
    members_.insert(members_.end(), src_members.begin() + src_offsets[b], src_members.begin() + src_offsets[b + 1]);
    offsets_.push_back(static_cast<std::uint32_t>(members_.size()));
  }
}

std::span<const std::uint32_t> HbeTable::members(std::size_t bucket) const {
  return std::span<const std::uint32_t>(members_).subspan(offsets_[bucket], offsets_[bucket + 1] - offsets_[bucket]);
}

std::size_t HbeTable::find(std::uint64_t key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return keys_.size();
  return static_cast<std::size_t>(it - keys_.begin());
}

PStableHash HbeEstimator::table_hash(std::size_t dim, const KernelSpec& kernel, std::uint64_t seed, std::size_t j) {
  return PStableHash(dim, dim + 1, kHbeWidthPerSigma * kernel.sigma, derive_seed(SeedSpec{seed}, "hbe-table", j));
}

HbeEstimator HbeEstimator::build(const Dataset& data, const KernelSpec& kernel, Real epsilon, Real mu,
                                 std::uint64_t seed) {
  return build(data, kernel, epsilon, mu, HbeRepetitions::sized_for(epsilon, mu, data.size()), seed);
}

HbeEstimator HbeEstimator::build(const Dataset& data, const KernelSpec& kernel, Real epsilon, Real mu,
                                 HbeRepetitions reps, std::uint64_t seed) {
  kernel.validate();
  validate_hbe_args(epsilon, mu);
  if (reps.means < 1 || reps.medians < 1 || reps.medians % 2 == 0)
    throw std::invalid_argument("hbe: need means >= 1 and an odd number of medians");
  HbeEstimator est;
  est.kernel_ = kernel;
  est.epsilon_ = epsilon;
  est.mu_ = mu;
  est.reps_ = reps;
  est.seed_ = seed;
  est.tables_.reserve(reps.total());
  KeyGrouper scratch;
  for (std::size_t j = 0; j < reps.total(); ++j)
    est.tables_.emplace_back(data, table_hash(data.dim(), kernel, seed, j), scratch);
  return est;
}

Real hbe_single_sample(const Dataset& data, const PStableHash& hash, std::span<const std::uint32_t> bucket,
                       std::span<const Real> q, const KernelSpec& kernel, std::uint64_t draw) {
  if (bucket.empty()) return 0.0;
  const PointId y = bucket[uniform_index(draw, bucket.size())];
  const Real d2 = squared_euclidean(q, data.point(y));
  const Real dist = std::sqrt(d2);
  const Real p = dist < kSingularDistance ? 1.0 : hash.collision_probability(dist);
  const Real weight = static_cast<Real>(bucket.size()) / static_cast<Real>(data.size());
  const Real value = weight * std::exp(-d2 / (kernel.sigma * kernel.sigma)) / p;
  return std::max(0.0, value);
}

Real median_of_means(std::span<const Real> samples, HbeRepetitions reps) {
  if (samples.size() != reps.total()) throw std::invalid_argument("median_of_means: sample count mismatch");
  std::vector<Real> means(reps.medians, 0.0);
  for (std::size_t j = 0; j < samples.size(); ++j) means[j / reps.means] += samples[j];
  for (Real& m : means) m /= static_cast<Real>(reps.means);
  auto mid = means.begin() + static_cast<std::ptrdiff_t>(means.size() / 2);
  std::nth_element(means.begin(), mid, means.end());
  return *mid;
}

std::vector<Real> HbeEstimator::samples(const Dataset& data, std::span<const Real> q, std::uint64_t stream) const {
  if (q.size() != data.dim()) throw std::invalid_argument("hbe: dimension mismatch");
  std::vector<Real> out;
  out.reserve(tables_.size());
  for (std::size_t j = 0; j < tables_.size(); ++j) {
    const HbeTable& table = tables_[j];
    const std::size_t b = table.find(table.hash().key(q));
    const auto bucket = b < table.num_buckets() ? table.members(b) : std::span<const std::uint32_t>();
    out.push_back(hbe_single_sample(data, table.hash(), bucket, q, kernel_, draw_key(stream, j)));
  }
  return out;
}

Real HbeEstimator::estimate(const Dataset& data, std::span<const Real> q, std::uint64_t stream) const {
  return median_of_means(samples(data, q, stream), reps_);
}

std::uint64_t hbe_point_stream(std::uint64_t seed, PointId i) {
  return derive_seed(SeedSpec{seed}, "hbe-q", i);
}

DensityEstimate estimate_all(const Dataset& data, const KernelSpec& kernel, EstimatorKind mode, Real epsilon, Real mu,
                             std::uint64_t seed) {
  kernel.validate();
  const std::size_t n = data.size();
  DensityEstimate result;
  result.estimator = mode;
  result.seed = seed;
  result.values.resize(n);

  if (mode == EstimatorKind::exact) {
    for (PointId i = 0; i < n; ++i) result.values[i] = exact_kde(data, data.point(i), kernel);
    return result;
  }

  result.epsilon = epsilon;
  const HbeRepetitions reps = HbeRepetitions::sized_for(epsilon, mu, n);
  std::vector<std::uint64_t> streams(n);
  for (PointId i = 0; i < n; ++i) streams[i] = hbe_point_stream(seed, i);

  // sums[i * t + g]: running sum of group g for point i, filled in table order
  std::vector<Real> sums(n * reps.medians, 0.0);
  std::vector<std::uint64_t> keys(n);
  KeyGrouper grouper;
  for (std::size_t j = 0; j < reps.total(); ++j) {
    const PStableHash hash = HbeEstimator::table_hash(data.dim(), kernel, seed, j);
    for (PointId i = 0; i < n; ++i) keys[i] = hash.key(data.point(i));
    grouper.group(keys);
    const auto offsets = grouper.offsets();
    const auto members = grouper.members();
    const auto point_bucket = grouper.point_bucket();
    const std::size_t group = j / reps.means;
    for (PointId i = 0; i < n; ++i) {
      const std::uint32_t b = point_bucket[i];
      const auto bucket = members.subspan(offsets[b], offsets[b + 1] - offsets[b]);
      sums[i * reps.medians + group] += hbe_single_sample(data, hash, bucket, data.point(i), kernel, draw_key(streams[i], j));
    }
  }
  std::vector<Real> means(reps.medians);
  for (PointId i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < reps.medians; ++g) means[g] = sums[i * reps.medians + g] / static_cast<Real>(reps.means);
    auto mid = means.begin() + static_cast<std::ptrdiff_t>(means.size() / 2);
    std::nth_element(means.begin(), mid, means.end());
    result.values[i] = *mid;
  }
  return result;
}

}  // namespace lshqs
