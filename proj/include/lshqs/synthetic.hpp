#pragma once

#include <cstdint>
#include <vector>

#include "lshqs/geometry.hpp"

namespace lshqs {

/// Equal-weight isotropic Gaussian mixture. Labels carry the component id.
Dataset gaussian_mixture(const std::vector<Point>& centers, Real spread, std::size_t n, std::uint64_t seed);

/// Gaussian blobs truncated to `radius` around each center (rejection
/// sampling), `per_blob` points each, labelled by blob, blob after blob.
Dataset truncated_blobs(const std::vector<Point>& centers, Real spread, Real radius, std::size_t per_blob,
                        std::uint64_t seed);

/// k centers in d dimensions drawn uniformly from [-scale, scale]^d.
std::vector<Point> random_centers(std::size_t k, std::size_t dim, Real scale, std::uint64_t seed);

}  // namespace lshqs
