#include "lshqs/synthetic.hpp"

#include <stdexcept>

namespace lshqs {

Dataset gaussian_mixture(const std::vector<Point>& centers, Real spread, std::size_t n, std::uint64_t seed) {
  if (centers.empty() || n == 0) throw std::invalid_argument("gaussian_mixture: need centers and n >= 1");
  const std::size_t dim = centers.front().dim();
  Engine engine(derive_seed(SeedSpec{seed}, "mixture", 0));
  std::vector<Real> values;
  values.reserve(n * dim);
  std::vector<Label> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = uniform_index(engine(), centers.size());
    for (std::size_t j = 0; j < dim; ++j) values.push_back(centers[k][j] + spread * standard_normal(engine));
    labels.push_back(static_cast<Label>(k));
  }
  return Dataset(dim, std::move(values), std::move(labels));
}

Dataset truncated_blobs(const std::vector<Point>& centers, Real spread, Real radius, std::size_t per_blob,
                        std::uint64_t seed) {
  if (centers.empty() || per_blob == 0) throw std::invalid_argument("truncated_blobs: need centers and points");
  const std::size_t dim = centers.front().dim();
  Engine engine(derive_seed(SeedSpec{seed}, "blobs", 0));
  std::vector<Real> values;
  std::vector<Label> labels;
  std::vector<Real> offset(dim);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    for (std::size_t i = 0; i < per_blob;) {
      Real norm2 = 0.0;
      for (auto& o : offset) {
        o = spread * standard_normal(engine);
        norm2 += o * o;
      }
      if (norm2 > radius * radius) continue;
      for (std::size_t j = 0; j < dim; ++j) values.push_back(centers[k][j] + offset[j]);
      labels.push_back(static_cast<Label>(k));
      ++i;
    }
  }
  return Dataset(dim, std::move(values), std::move(labels));
}

std::vector<Point> random_centers(std::size_t k, std::size_t dim, Real scale, std::uint64_t seed) {
  Engine engine(derive_seed(SeedSpec{seed}, "centers", 0));
  std::vector<Point> centers;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<Real> coords(dim);
    for (auto& x : coords) x = (2.0 * unit_uniform(engine) - 1.0) * scale;
    centers.emplace_back(std::move(coords));
  }
  return centers;
}

}  // namespace lshqs
