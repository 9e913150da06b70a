#include "lshqs/lsh_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lshqs {

Real collision_probability(Real dist, Real w) {
  if (!(w > 0.0)) throw std::invalid_argument("collision_probability: bucket width must be > 0");
  if (dist < 0.0 || std::isnan(dist)) throw std::invalid_argument("collision_probability: negative distance");
  if (dist == 0.0) return 1.0;
  const Real ratio = w / dist;
  // 2 * Phi(-ratio) == erfc(ratio / sqrt 2)
  const Real tail = std::erfc(ratio / std::numbers::sqrt2);
  const Real body = (2.0 / (std::sqrt(2.0 * std::numbers::pi) * ratio)) * (-std::expm1(-0.5 * ratio * ratio));
  return 1.0 - tail - body;
}

PStableHash::PStableHash(std::size_t dim, std::size_t concat, Real width, std::uint64_t seed)
    : dim_(dim), concat_(concat), width_(width) {
  if (dim_ == 0 || concat_ == 0) throw std::invalid_argument("PStableHash: dim and concat must be >= 1");
  if (!(width_ > 0.0)) throw std::invalid_argument("PStableHash: width must be > 0");
  Engine engine(seed);
  directions_.resize(concat_ * dim_);
  offsets_.resize(concat_);
  for (std::size_t k = 0; k < concat_; ++k) {
    for (std::size_t j = 0; j < dim_; ++j) directions_[k * dim_ + j] = standard_normal(engine);
    offsets_[k] = unit_uniform(engine) * width_;
  }
  scaled_directions_.resize(concat_ * dim_);
  scaled_offsets_.resize(concat_);
  for (std::size_t k = 0; k < concat_; ++k) {
    scaled_offsets_[k] = offsets_[k] / width_;
    for (std::size_t j = 0; j < dim_; ++j) scaled_directions_[j * concat_ + k] = directions_[k * dim_ + j] / width_;
  }
}

std::uint64_t PStableHash::key(std::span<const Real> x) const {
  constexpr Real kLimit = 9.0e18;
  constexpr std::size_t kStack = 64;
  Real stack[kStack];
  std::vector<Real> heap;
  Real* dot = stack;
  if (concat_ > kStack) {
    heap.resize(concat_);
    dot = heap.data();
  }
  std::copy(scaled_offsets_.begin(), scaled_offsets_.end(), dot);
  const Real* dir = scaled_directions_.data();
  for (std::size_t j = 0; j < dim_; ++j, dir += concat_) {
    const Real xj = x[j];
    for (std::size_t k = 0; k < concat_; ++k) dot[k] += dir[k] * xj;
  }
  std::uint64_t h = mix64(concat_);
  for (std::size_t k = 0; k < concat_; ++k) {
    const Real v = std::clamp(dot[k], -kLimit, kLimit);
    auto slot = static_cast<std::int64_t>(v);
    if (static_cast<Real>(slot) > v) --slot;  // floor
    h = mix64(h ^ static_cast<std::uint64_t>(slot));
  }
  return h;
}

Real PStableHash::collision_probability(Real dist) const {
  return std::pow(lshqs::collision_probability(dist, width_), static_cast<Real>(concat_));
}

void LshParams::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("LshParams: radius must be > 0");
  if (!(approximation > 1.0)) throw std::invalid_argument("LshParams: approximation factor must be > 1");
  if (tables < 1) throw std::invalid_argument("LshParams: need at least one table");
  if (concat < 1) throw std::invalid_argument("LshParams: concatenation must be >= 1");
  if (!(bucket_width > 0.0)) throw std::invalid_argument("LshParams: bucket width must be > 0");
}

std::size_t tables_for_miss_probability(Real p_table, Real miss) {
  if (p_table >= 1.0) return 1;
  if (p_table <= 0.0) return std::numeric_limits<std::size_t>::max();
  const Real raw = std::log(miss) / std::log1p(-p_table);
  auto tables = static_cast<std::size_t>(std::max(1.0, std::ceil(raw)));
  // guard against ceil landing one short through rounding
  while (std::pow(1.0 - p_table, static_cast<Real>(tables)) > miss) ++tables;
  return tables;
}

LshParams LshParams::sized_for(std::size_t n, std::size_t dim, Real radius, Real approximation,
                               std::uint64_t seed) {
  LshParams params;
  params.radius = radius;
  params.approximation = approximation;
  params.bucket_width = kWidthPerRadius * radius;
  params.seed = seed;
  const Real log_n = std::round(std::log2(static_cast<Real>(std::max<std::size_t>(n, 1))));
  params.concat = std::max<std::size_t>(1, std::min<std::size_t>(dim + 1, static_cast<std::size_t>(log_n)));
  const Real p1 = std::pow(collision_probability(radius, params.bucket_width), static_cast<Real>(params.concat));
  params.tables = std::clamp(tables_for_miss_probability(p1, 0.1), kMinTables, kMaxTables);
  return params;
}

LshIndex LshIndex::build(const Dataset& data, const LshParams& params) {
  params.validate();
  LshIndex index(data, params);
  const std::size_t n = data.size();
  const SeedSpec seeds{params.seed};
  index.tables_.reserve(params.tables);
  for (std::size_t t = 0; t < params.tables; ++t) {
    Table table{PStableHash(data.dim(), params.concat, params.bucket_width, derive_seed(seeds, "lsh-table", t)),
                {}, {}, {}, {}, {}, {}};
    table.point_bucket.resize(n);
    std::vector<std::size_t> counts;
    for (PointId i = 0; i < n; ++i) {
      const std::uint64_t key = table.hash.key(data.point(i));
      auto [it, inserted] = table.lookup.try_emplace(key, table.keys.size());
      if (inserted) {
        table.keys.push_back(key);
        counts.push_back(0);
      }
      table.point_bucket[i] = it->second;
      ++counts[it->second];
    }
    table.offsets.assign(table.keys.size() + 1, 0);
    for (std::size_t b = 0; b < counts.size(); ++b) table.offsets[b + 1] = table.offsets[b] + counts[b];
    table.members.resize(n);
    std::vector<std::size_t> cursor(table.offsets.begin(), table.offsets.end() - 1);
    for (PointId i = 0; i < n; ++i) table.members[cursor[table.point_bucket[i]]++] = i;
    index.tables_.push_back(std::move(table));
  }
  return index;
}

std::span<const PointId> LshIndex::bucket_members(std::size_t table, std::size_t bucket) const {
  const Table& tb = tables_[table];
  return std::span<const PointId>(tb.members).subspan(tb.offsets[bucket], tb.offsets[bucket + 1] - tb.offsets[bucket]);
}

std::optional<PointId> LshIndex::bucket_argmax(std::size_t table, std::size_t bucket) const {
  if (!has_densities()) return std::nullopt;
  return tables_[table].argmax[bucket];
}

bool LshIndex::within_filter(std::span<const Real> q, PointId j) const {
  const Real limit = params_.approximation * params_.radius;
  return squared_euclidean(q, data_.point(j)) <= limit * limit;
}

std::vector<PointId> LshIndex::query_ann(std::span<const Real> q, std::size_t k) const {
  if (q.size() != data_.dim()) throw std::invalid_argument("query_ann: dimension mismatch");
  std::vector<PointId> candidates;
  for (const Table& table : tables_) {
    auto it = table.lookup.find(table.hash.key(q));
    if (it == table.lookup.end()) continue;
    const std::size_t b = it->second;
    candidates.insert(candidates.end(), table.members.begin() + table.offsets[b],
                      table.members.begin() + table.offsets[b + 1]);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const Real limit = params_.approximation * params_.radius;
  std::vector<std::pair<Real, PointId>> hits;
  for (PointId j : candidates) {
    const Real d2 = squared_euclidean(q, data_.point(j));
    if (d2 <= limit * limit) hits.emplace_back(d2, j);
  }
  const std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end());
  std::vector<PointId> result;
  result.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) result.push_back(hits[i].second);
  return result;
}

void LshIndex::register_densities(std::span<const Real> densities) {
  if (densities.size() != data_.size()) throw std::invalid_argument("register_densities: length mismatch");
  for (Real v : densities) {
    if (!std::isfinite(v)) throw std::invalid_argument("register_densities: non-finite density");
  }
  densities_.assign(densities.begin(), densities.end());
  for (Table& table : tables_) {
    table.argmax.assign(table.keys.size(), 0);
    for (std::size_t b = 0; b < table.keys.size(); ++b) {
      // members ascend by id, so a strict comparison keeps the lowest id on ties
      PointId best = table.members[table.offsets[b]];
      for (std::size_t pos = table.offsets[b] + 1; pos < table.offsets[b + 1]; ++pos) {
        const PointId j = table.members[pos];
        if (densities_[j] > densities_[best]) best = j;
      }
      table.argmax[b] = best;
    }
  }
}

std::optional<PointId> LshIndex::argmax_density_neighbor(PointId i) const {
  if (!has_densities()) throw std::logic_error("argmax_density_neighbor: densities not registered");
  if (i >= data_.size()) throw std::out_of_range("argmax_density_neighbor: point id out of range");
  const auto xi = data_.point(i);
  std::optional<PointId> best;
  for (const Table& table : tables_) {
    const PointId j = table.argmax[table.point_bucket[i]];
    if (j == i) continue;
    if (best && (densities_[j] < densities_[*best] || (densities_[j] == densities_[*best] && j >= *best))) continue;
    if (!within_filter(xi, j)) continue;
    best = j;
  }
  return best;
}

}  // namespace lshqs
