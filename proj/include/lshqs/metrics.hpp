#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lshqs/geometry.hpp"

namespace lshqs {

/// Co-occurrence counts of two labelings. Rows follow the sorted distinct
/// values of the first labeling, columns those of the second.
struct ContingencyTable {
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t total = 0;

  static ContingencyTable from_labels(std::span<const Label> a, std::span<const Label> b);
};

/// Adjusted Rand Index. Labels are opaque integers. Throws on length
/// mismatch or fewer than two elements. When the chance-adjusted
/// denominator vanishes the result is 1 for identical partitions and 0
/// otherwise.
double adjusted_rand_index(std::span<const Label> a, std::span<const Label> b);

/// Adjusted Mutual Information with the arithmetic-mean normalizer and the
/// exact hypergeometric expectation of the mutual information (natural
/// logs). Same error and degenerate-case rules as adjusted_rand_index.
double adjusted_mutual_info(std::span<const Label> a, std::span<const Label> b);

double mutual_info(const ContingencyTable& table);
double entropy(std::span<const std::size_t> marginals, std::size_t total);
double expected_mutual_info(const ContingencyTable& table);

/// True when the two labelings induce the same partition.
bool same_partition(std::span<const Label> a, std::span<const Label> b);

/// Symmetric Hausdorff distance between two nonempty point sets.
double hausdorff_distance(std::span<const Point> a, std::span<const Point> b);

/// Converts root-id labels into Label values.
std::vector<Label> to_labels(std::span<const PointId> ids);

}  // namespace lshqs
