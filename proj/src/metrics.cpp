#include "lshqs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lshqs {

namespace {

constexpr double kDegenerate = 1e-12;

void check_lengths(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw std::invalid_argument("labelings differ in length");
  if (a.size() < 2) throw std::invalid_argument("need at least two labeled elements");
}

std::uint64_t pairs(std::uint64_t k) { return k * (k - (k > 0 ? 1 : 0)) / 2; }

std::vector<std::size_t> dense_codes(std::span<const Label> labels, std::size_t& distinct) {
  std::vector<Label> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  distinct = sorted.size();
  std::vector<std::size_t> codes(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    codes[i] = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), labels[i]) - sorted.begin());
  return codes;
}

}  // namespace

ContingencyTable ContingencyTable::from_labels(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) throw std::invalid_argument("labelings differ in length");
  std::size_t rows = 0;
  std::size_t cols = 0;
  const auto ra = dense_codes(a, rows);
  const auto cb = dense_codes(b, cols);
  ContingencyTable t;
  t.counts.assign(rows, std::vector<std::size_t>(cols, 0));
  t.row_sums.assign(rows, 0);
  t.col_sums.assign(cols, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++t.counts[ra[i]][cb[i]];
    ++t.row_sums[ra[i]];
    ++t.col_sums[cb[i]];
  }
  t.total = a.size();
  return t;
}

bool same_partition(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) return false;
  std::map<Label, Label> forward;
  std::map<Label, Label> backward;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto [f, f_new] = forward.try_emplace(a[i], b[i]);
    auto [g, g_new] = backward.try_emplace(b[i], a[i]);
    if (f->second != b[i] || g->second != a[i]) return false;
  }
  return true;
}

double adjusted_rand_index(std::span<const Label> a, std::span<const Label> b) {
  check_lengths(a, b);
  const auto t = ContingencyTable::from_labels(a, b);
  std::uint64_t joint = 0;
  for (const auto& row : t.counts)
    for (std::size_t c : row) joint += pairs(c);
  std::uint64_t sum_a = 0;
  std::uint64_t sum_b = 0;
  for (std::size_t r : t.row_sums) sum_a += pairs(r);
  for (std::size_t c : t.col_sums) sum_b += pairs(c);
  const std::uint64_t all = pairs(t.total);

  // max == expected  <=>  (sum_a + sum_b) * all == 2 * sum_a * sum_b, checked exactly
  using Wide = unsigned __int128;
  if (static_cast<Wide>(sum_a + sum_b) * all == 2 * static_cast<Wide>(sum_a) * sum_b)
    return same_partition(a, b) ? 1.0 : 0.0;

  const double expected = static_cast<double>(sum_a) * static_cast<double>(sum_b) / static_cast<double>(all);
  const double max_index = 0.5 * static_cast<double>(sum_a + sum_b);
  return (static_cast<double>(joint) - expected) / (max_index - expected);
}

double entropy(std::span<const std::size_t> marginals, std::size_t total) {
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::size_t m : marginals) {
    if (m == 0) continue;
    const double p = static_cast<double>(m) / n;
    h -= p * std::log(p);
  }
  return h;
}

double mutual_info(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total);
  double mi = 0.0;
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
      const std::size_t c = t.counts[i][j];
      if (c == 0) continue;
      const double nij = static_cast<double>(c);
      mi += nij / n * std::log(n * nij / (static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j])));
    }
  }
  return mi;
}

double expected_mutual_info(const ContingencyTable& t) {
  const std::size_t n = t.total;
  const double nd = static_cast<double>(n);
  // log-factorials 0..n
  std::vector<double> lf(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) lf[k] = std::lgamma(static_cast<double>(k) + 1.0);
  double emi = 0.0;
  for (std::size_t ai : t.row_sums) {
    for (std::size_t bj : t.col_sums) {
      const std::size_t lo = std::max<std::size_t>(1, ai + bj > n ? ai + bj - n : 0);
      const std::size_t hi = std::min(ai, bj);
      const double fixed = lf[ai] + lf[bj] + lf[n - ai] + lf[n - bj] - lf[n];
      for (std::size_t k = lo; k <= hi; ++k) {
        const double kd = static_cast<double>(k);
        const double log_p = fixed - lf[k] - lf[ai - k] - lf[bj - k] - lf[n - ai - bj + k];
        const double term = kd / nd * std::log(nd * kd / (static_cast<double>(ai) * static_cast<double>(bj)));
        emi += term * std::exp(log_p);
      }
    }
  }
  return emi;
}

double adjusted_mutual_info(std::span<const Label> a, std::span<const Label> b) {
  check_lengths(a, b);
  const auto t = ContingencyTable::from_labels(a, b);
  if (t.row_sums.size() == 1 && t.col_sums.size() == 1) return 1.0;
  const double mi = mutual_info(t);
  const double emi = expected_mutual_info(t);
  const double normalizer = 0.5 * (entropy(t.row_sums, t.total) + entropy(t.col_sums, t.total));
  const double denominator = normalizer - emi;
  if (std::abs(denominator) < kDegenerate) return same_partition(a, b) ? 1.0 : 0.0;
  return (mi - emi) / denominator;
}

double hausdorff_distance(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty point set");
  auto directed = [](std::span<const Point> from, std::span<const Point> to) {
    double worst = 0.0;
    for (const Point& p : from) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const Point& q : to) nearest = std::min(nearest, squared_euclidean(p, q));
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

std::vector<Label> to_labels(std::span<const PointId> ids) {
  return std::vector<Label>(ids.begin(), ids.end());
}

}  // namespace lshqs
