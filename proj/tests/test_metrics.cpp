#include <doctest.h>

#include <cmath>

#include "lshqs/metrics.hpp"
#include "oracles.hpp"

using namespace lshqs;

namespace {

std::vector<Label> L(std::initializer_list<Label> v) { return v; }

std::vector<Label> random_labels(Engine& engine, std::size_t n, std::size_t k) {
  std::vector<Label> out(n);
  for (auto& v : out) v = static_cast<Label>(uniform_index(engine(), k)) * 7 - 3;
  return out;
}

}  // namespace

TEST_CASE("set partition enumeration counts Bell numbers") {
  CHECK(oracle::set_partitions(1).size() == 1);
  CHECK(oracle::set_partitions(4).size() == 15);
  CHECK(oracle::set_partitions(5).size() == 52);
}

TEST_CASE("ari simple cases") {
  CHECK(adjusted_rand_index(L({0, 0, 1, 1, 2}), L({0, 0, 1, 1, 2})) == 1.0);
  CHECK(adjusted_rand_index(L({0, 0, 1, 1}), L({1, 1, 0, 0})) == 1.0);
  const double mixed = adjusted_rand_index(L({0, 0, 1, 1}), L({0, 1, 0, 1}));
  CHECK(mixed == doctest::Approx(oracle::pair_counting_ari(L({0, 0, 1, 1}), L({0, 1, 0, 1}))).epsilon(1e-14));
  CHECK(mixed == doctest::Approx(-0.5));
  CHECK_THROWS_AS(adjusted_rand_index(L({0, 1}), L({0})), std::invalid_argument);
  CHECK_THROWS_AS(adjusted_rand_index(L({0}), L({0})), std::invalid_argument);
}

TEST_CASE("ari degenerate denominators") {
  CHECK(adjusted_rand_index(L({4, 4, 4}), L({1, 1, 1})) == 1.0);
  CHECK(adjusted_rand_index(L({0, 1, 2}), L({5, 6, 7})) == 1.0);
  CHECK(adjusted_rand_index(L({0, 0, 0}), L({0, 1, 2})) == 0.0);
}

TEST_CASE("ami simple cases") {
  CHECK(adjusted_mutual_info(L({0, 0, 1, 1}), L({0, 0, 1, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  const auto a = L({0, 0, 1, 1, 2, 2, 2});
  const auto b = L({1, 0, 1, 1, 2, 0, 2});
  const auto b_relabeled = L({9, 4, 9, 9, -1, 4, -1});
  CHECK(adjusted_mutual_info(a, b) == doctest::Approx(adjusted_mutual_info(a, b_relabeled)).epsilon(1e-14));
  CHECK(adjusted_mutual_info(L({3, 3, 3}), L({8, 8, 8})) == 1.0);
  const double v = adjusted_mutual_info(L({0, 0, 1, 1}), L({0, 0, 1, 2}));
  CHECK(std::fabs(v - oracle::direct_ami(L({0, 0, 1, 1}), L({0, 0, 1, 2}))) <= 1e-12);
}

TEST_CASE("information pieces") {
  const auto t = ContingencyTable::from_labels(L({0, 0, 1, 1}), L({5, 5, 5, 6}));
  CHECK(t.total == 4);
  CHECK(t.counts == std::vector<std::vector<std::size_t>>{{2, 0}, {1, 1}});
  CHECK(entropy(t.row_sums, t.total) == doctest::Approx(std::log(2.0)));
  CHECK(mutual_info(t) >= 0.0);
  CHECK(expected_mutual_info(t) >= 0.0);
}

TEST_CASE("ari and ami match the oracles on every pair of 5-element partitions") {
  const auto parts = oracle::set_partitions(5);
  double worst_ari = 0.0, worst_ami = 0.0;
  for (const auto& a : parts) {
    for (const auto& b : parts) {
      worst_ari = std::max(worst_ari, std::fabs(adjusted_rand_index(a, b) - oracle::pair_counting_ari(a, b)));
      worst_ami = std::max(worst_ami, std::fabs(adjusted_mutual_info(a, b) - oracle::direct_ami(a, b)));
    }
  }
  CHECK(worst_ari <= 1e-12);
  CHECK(worst_ami <= 1e-12);
}

TEST_CASE("ari and ami match the oracles on random labelings of 4 to 8 elements") {
  Engine engine(77);
  for (std::size_t n = 4; n <= 8; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto a = random_labels(engine, n, 1 + uniform_index(engine(), n));
      const auto b = random_labels(engine, n, 1 + uniform_index(engine(), n));
      CHECK(std::fabs(adjusted_rand_index(a, b) - oracle::pair_counting_ari(a, b)) <= 1e-12);
      CHECK(std::fabs(adjusted_mutual_info(a, b) - oracle::direct_ami(a, b)) <= 1e-12);
    }
  }
}

TEST_CASE("ami on larger labelings stays close to the direct summation") {
  Engine engine(5);
  const auto a = random_labels(engine, 60, 4);
  const auto b = random_labels(engine, 60, 5);
  CHECK(adjusted_mutual_info(a, b) == doctest::Approx(oracle::direct_ami(a, b)).epsilon(1e-9));
}

TEST_CASE("hausdorff distance") {
  const std::vector<Point> a{Point{0.0}, Point{1.0}};
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(std::vector<Point>{Point{0.0}}, std::vector<Point>{Point{3.0}}) == 3.0);
  CHECK_THROWS_AS(hausdorff_distance(std::vector<Point>{}, a), std::invalid_argument);
}

TEST_CASE("hausdorff matches the double loop exactly on random sets") {
  Engine engine(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + uniform_index(engine(), 4);
    auto draw = [&](std::size_t count) {
      std::vector<Point> s;
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<Real> c(dim);
        for (auto& v : c) v = standard_normal(engine) * 5.0;
        s.emplace_back(std::move(c));
      }
      return s;
    };
    const auto a = draw(20);
    const auto b = draw(30);
    CHECK(hausdorff_distance(a, b) == oracle::double_loop_hausdorff(a, b));
  }
}

TEST_CASE("to_labels keeps ids") {
  const std::vector<PointId> ids{4, 4, 9};
  CHECK(to_labels(ids) == L({4, 4, 9}));
}
