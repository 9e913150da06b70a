#include "lshqs/geometry.hpp"

#include <cmath>
#include <numbers>

namespace lshqs {

namespace {

void require_finite(std::span<const Real> values, const char* what) {
  for (Real v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
  }
}

}  // namespace

Point::Point(std::vector<Real> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("Point: dimension must be >= 1");
  require_finite(coords_, "Point");
}

Dataset::Dataset(std::size_t dim, std::vector<Real> row_major, std::optional<std::vector<Label>> labels)
    : dim_(dim), n_(0), labels_(std::move(labels)) {
  if (dim_ == 0) throw std::invalid_argument("Dataset: dimension must be >= 1");
  if (row_major.empty()) throw std::invalid_argument("Dataset: needs at least one point");
  if (row_major.size() % dim_ != 0) throw std::invalid_argument("Dataset: ragged storage");
  require_finite(row_major, "Dataset");
  n_ = row_major.size() / dim_;
  if (labels_ && labels_->size() != n_) throw std::invalid_argument("Dataset: label count differs from point count");
  values_ = std::make_shared<const std::vector<Real>>(std::move(row_major));
}

Dataset Dataset::from_rows(const std::vector<std::vector<Real>>& rows, std::optional<std::vector<Label>> labels) {
  if (rows.empty()) throw std::invalid_argument("Dataset: needs at least one point");
  const std::size_t dim = rows.front().size();
  std::vector<Real> flat;
  flat.reserve(rows.size() * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw std::invalid_argument("Dataset: ragged rows");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Dataset(dim, std::move(flat), std::move(labels));
}

Point Dataset::point_copy(PointId i) const {
  auto p = point(i);
  return Point(std::vector<Real>(p.begin(), p.end()));
}

Dataset Dataset::with_labels(std::optional<std::vector<Label>> labels) const {
  if (labels && labels->size() != n_) throw std::invalid_argument("Dataset: label count differs from point count");
  Dataset copy = *this;
  copy.labels_ = std::move(labels);
  return copy;
}

Real squared_euclidean(std::span<const Real> a, std::span<const Real> b) {
  if (a.size() != b.size()) throw std::invalid_argument("squared_euclidean: dimension mismatch");
  Real sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const Real diff = a[j] - b[j];
    sum += diff * diff;
  }
  return sum;
}

std::uint64_t derive_seed(const SeedSpec& spec, std::string_view tag, std::uint64_t index) {
  // FNV-1a over the tag
  std::uint64_t tag_hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    tag_hash ^= ch;
    tag_hash *= 0x100000001b3ULL;
  }
  std::uint64_t h = mix64(spec.master);
  h = mix64(h ^ tag_hash);
  return mix64(h ^ mix64(index));
}

std::size_t uniform_index(std::uint64_t key, std::size_t bound) {
  const unsigned __int128 wide = static_cast<unsigned __int128>(mix64(key)) * bound;
  return static_cast<std::size_t>(wide >> 64);
}

Real unit_uniform(Engine& engine) {
  return static_cast<Real>(engine() >> 11) * 0x1.0p-53;
}

Real standard_normal(Engine& engine) {
  Real u1 = unit_uniform(engine);
  while (u1 <= 0.0) u1 = unit_uniform(engine);
  const Real u2 = unit_uniform(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace lshqs
