#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "lshqs/quickshift.hpp"
#include "lshqs/synthetic.hpp"

namespace lshqs::testing {

/// Two truncated blobs, centers 8h apart, each confined to radius 2h, so
/// the empty margin between them is at least 4h wide.
inline Dataset valley_instance(Real h, std::size_t per_blob, std::uint64_t seed) {
  return truncated_blobs({Point{0.0, 0.0}, Point{8.0 * h, 0.0}}, h, 2.0 * h, per_blob, seed);
}

/// 200-point 2-d mixture with a seed-dependent number of components and
/// spread, used for oracle comparisons.
inline Dataset random_small_dataset(std::uint64_t seed) {
  Engine engine(derive_seed(SeedSpec{seed}, "small", 0));
  const std::size_t k = 1 + uniform_index(engine(), 4);
  const Real spread = 0.4 + unit_uniform(engine);
  return gaussian_mixture(random_centers(k, 2, 4.0, seed), spread, 200, seed);
}

/// Concatenated invariant violations, empty when the forest is sound.
inline std::string violations(const Dataset& data, const QuickShiftForest& forest) {
  std::string out;
  for (const auto& v : verify_forest(data, forest)) out += v + "; ";
  return out;
}

/// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("lshqs-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  static std::uint64_t& counter() {
    static std::uint64_t c = 0;
    return c;
  }
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace lshqs::testing
