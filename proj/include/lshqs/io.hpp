#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lshqs/geometry.hpp"

namespace lshqs {

/// Parses comma-separated numeric rows. Blank lines are skipped and CRLF
/// endings accepted. When `label_column` is set that column becomes the
/// dataset labels: integers are kept as they are, any other strings are
/// numbered in order of first appearance. Throws ParseError naming the
/// offending line.
Dataset parse_csv(std::string_view text, bool has_header, std::optional<std::size_t> label_column);
Dataset load_csv(const std::filesystem::path& path, bool has_header, std::optional<std::size_t> label_column);

/// 8-bit RGB raster, row-major, three bytes per pixel.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  std::size_t pixels() const { return width * height; }
  bool operator==(const Image&) const = default;
};

/// P3 or P6 with maxval 255. Header comments are allowed.
Image parse_ppm(std::string_view bytes);
Image read_ppm(const std::filesystem::path& path);
std::string encode_ppm(const Image& image, bool binary = true);
void write_ppm(const std::filesystem::path& path, const Image& image, bool binary = true);

/// Pixel features (r, g, b, lambda * x, lambda * y) with colours scaled to
/// [0, 1] and x = column / (width - 1), y = row / (height - 1). A width or
/// height of 1 gives coordinate 0.
struct ImageFeatureSpec {
  Real lambda = 0.2;
  void validate() const;
};

Dataset image_features(const Image& image, const ImageFeatureSpec& spec);

struct LoadedImage {
  Dataset data;
  Image image;
};

LoadedImage load_ppm(const std::filesystem::path& path, const ImageFeatureSpec& spec);

/// Whole file as bytes. Throws ParseError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// One label per line, LF-terminated.
std::string format_labels(std::span<const PointId> labels);

}  // namespace lshqs
