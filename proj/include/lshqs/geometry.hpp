#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lshqs {

using Real = double;
using PointId = std::size_t;
using Label = std::int64_t;

/// Raised when an input file cannot be parsed. Carries the 1-based line
/// number when one is meaningful (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A structural invariant of a result was found broken. Always a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A single point in R^d with finite coordinates.
class Point {
 public:
  explicit Point(std::vector<Real> coords);
  Point(std::initializer_list<Real> coords) : Point(std::vector<Real>(coords)) {}

  std::size_t dim() const { return coords_.size(); }
  std::span<const Real> coords() const { return coords_; }
  Real operator[](std::size_t j) const { return coords_[j]; }
  operator std::span<const Real>() const { return coords_; }
  bool operator==(const Point&) const = default;

 private:
  std::vector<Real> coords_;
};

/// Immutable n x d point matrix, stored row-major in one block.
///
/// Copies share the underlying storage, so passing a Dataset by value is
/// cheap. Optional integer labels hold ground truth and never take part in
/// clustering.
class Dataset {
 public:
  Dataset(std::size_t dim, std::vector<Real> row_major,
          std::optional<std::vector<Label>> labels = std::nullopt);

  static Dataset from_rows(const std::vector<std::vector<Real>>& rows,
                           std::optional<std::vector<Label>> labels = std::nullopt);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::span<const Real> point(PointId i) const { return {values_->data() + i * dim_, dim_}; }
  Point point_copy(PointId i) const;
  std::span<const Real> values() const { return *values_; }
  const std::optional<std::vector<Label>>& labels() const { return labels_; }

  /// Same points, labels dropped or replaced.
  Dataset with_labels(std::optional<std::vector<Label>> labels) const;

 private:
  std::size_t dim_;
  std::size_t n_;
  std::shared_ptr<const std::vector<Real>> values_;
  std::optional<std::vector<Label>> labels_;
};

/// Sum of squared coordinate differences. Throws std::invalid_argument on a
/// dimension mismatch.
Real squared_euclidean(std::span<const Real> a, std::span<const Real> b);

/// Master seed from which every random stream of a run is derived.
struct SeedSpec {
  std::uint64_t master = 0;
};

/// Child seed for (tag, index). Pure function of its arguments.
std::uint64_t derive_seed(const SeedSpec& spec, std::string_view tag, std::uint64_t index);

/// SplitMix64 finalizer; a bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based uniform draw from {0, ..., bound-1} keyed by `key`.
std::size_t uniform_index(std::uint64_t key, std::size_t bound);

/// Engine used for all sampling. Distribution helpers below are written
/// out so that streams are identical across standard libraries.
using Engine = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits.
Real unit_uniform(Engine& engine);

/// Standard normal draw (Box-Muller, one value per call).
Real standard_normal(Engine& engine);

}  // namespace lshqs
