#include "lshqs/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace lshqs {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<Real> parse_real(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  Real value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<Label> parse_int(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  Label value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

// Cursor over a PPM header: whitespace-separated tokens with # comments.
class PpmCursor {
 public:
  explicit PpmCursor(std::string_view bytes) : bytes_(bytes) {}

  std::size_t next_number(const char* what) {
    skip_space();
    std::size_t value = 0;
    const char* begin = bytes_.data() + pos_;
    auto [ptr, ec] = std::from_chars(begin, bytes_.data() + bytes_.size(), value);
    if (ec != std::errc() || ptr == begin) {
      if (pos_ >= bytes_.size()) throw ParseError(std::string("ppm: truncated payload reading ") + what);
      throw ParseError(std::string("ppm: malformed ") + what);
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t k) { pos_ += k; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Dataset parse_csv(std::string_view text, bool has_header, std::optional<std::size_t> label_column) {
  std::vector<Real> values;
  std::vector<std::string> raw_labels;
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split_commas(line);
    if (columns == 0) {
      columns = cells.size();
      if (label_column && *label_column >= columns)
        throw ParseError("label column " + std::to_string(*label_column) + " out of range", line_no);
      if (label_column && columns < 2) throw ParseError("no feature columns besides the label", line_no);
    } else if (cells.size() != columns) {
      throw ParseError("expected " + std::to_string(columns) + " fields, found " + std::to_string(cells.size()),
                       line_no);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (label_column && c == *label_column) {
        if (cells[c].empty()) throw ParseError("empty label cell", line_no);
        raw_labels.emplace_back(cells[c]);
        continue;
      }
      const auto v = parse_real(cells[c]);
      if (!v) throw ParseError("non-numeric feature '" + std::string(cells[c]) + "' in column " + std::to_string(c), line_no);
      values.push_back(*v);
    }
  }
  if (columns == 0) throw ParseError("empty file: no data rows");
  const std::size_t dim = label_column ? columns - 1 : columns;

  std::optional<std::vector<Label>> labels;
  if (label_column) {
    std::vector<Label> out;
    out.reserve(raw_labels.size());
    bool all_int = true;
    for (const auto& s : raw_labels) {
      const auto v = parse_int(s);
      if (!v) {
        all_int = false;
        break;
      }
      out.push_back(*v);
    }
    if (!all_int) {
      out.clear();
      std::map<std::string, Label> ids;
      for (const auto& s : raw_labels) {
        auto [it, inserted] = ids.try_emplace(s, static_cast<Label>(ids.size()));
        out.push_back(it->second);
      }
    }
    labels = std::move(out);
  }
  return Dataset(dim, std::move(values), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, bool has_header, std::optional<std::size_t> label_column) {
  return parse_csv(read_file(path), has_header, label_column);
}

Image parse_ppm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '3' && bytes[1] != '6'))
    throw ParseError("ppm: bad magic, expected P3 or P6");
  const bool binary = bytes[1] == '6';
  PpmCursor cur(bytes);
  cur.advance(2);
  Image image;
  image.width = cur.next_number("width");
  image.height = cur.next_number("height");
  const std::size_t maxval = cur.next_number("maxval");
  if (image.width == 0 || image.height == 0) throw ParseError("ppm: zero image dimension");
  if (maxval != 255) throw ParseError("ppm: maxval must be 255, found " + std::to_string(maxval));
  const std::size_t count = image.pixels() * 3;
  image.rgb.resize(count);
  if (binary) {
    // exactly one whitespace byte separates the header from the raster
    const std::size_t begin = cur.pos() + 1;
    if (begin > bytes.size() || bytes.size() - begin < count) throw ParseError("ppm: truncated payload");
    for (std::size_t k = 0; k < count; ++k) image.rgb[k] = static_cast<std::uint8_t>(bytes[begin + k]);
  } else {
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t v = cur.next_number("sample");
      if (v > 255) throw ParseError("ppm: sample " + std::to_string(v) + " exceeds maxval");
      image.rgb[k] = static_cast<std::uint8_t>(v);
    }
  }
  return image;
}

Image read_ppm(const std::filesystem::path& path) { return parse_ppm(read_file(path)); }

std::string encode_ppm(const Image& image, bool binary) {
  if (image.rgb.size() != image.pixels() * 3) throw std::invalid_argument("encode_ppm: raster size mismatch");
  std::ostringstream out;
  out << (binary ? "P6" : "P3") << '\n' << image.width << ' ' << image.height << "\n255\n";
  if (binary) {
    out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
  } else {
    for (std::size_t p = 0; p < image.pixels(); ++p) {
      out << int(image.rgb[3 * p]) << ' ' << int(image.rgb[3 * p + 1]) << ' ' << int(image.rgb[3 * p + 2]) << '\n';
    }
  }
  return out.str();
}

void write_ppm(const std::filesystem::path& path, const Image& image, bool binary) {
  write_file_atomic(path, encode_ppm(image, binary));
}

void ImageFeatureSpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be a finite value >= 0");
}

Dataset image_features(const Image& image, const ImageFeatureSpec& spec) {
  spec.validate();
  std::vector<Real> values;
  values.reserve(image.pixels() * 5);
  const Real x_den = image.width > 1 ? static_cast<Real>(image.width - 1) : 1.0;
  const Real y_den = image.height > 1 ? static_cast<Real>(image.height - 1) : 1.0;
  for (std::size_t row = 0; row < image.height; ++row) {
    for (std::size_t col = 0; col < image.width; ++col) {
      const std::size_t p = row * image.width + col;
      for (int ch = 0; ch < 3; ++ch) values.push_back(image.rgb[3 * p + ch] / 255.0);
      values.push_back(image.width > 1 ? spec.lambda * (static_cast<Real>(col) / x_den) : 0.0);
      values.push_back(image.height > 1 ? spec.lambda * (static_cast<Real>(row) / y_den) : 0.0);
    }
  }
  return Dataset(5, std::move(values));
}

LoadedImage load_ppm(const std::filesystem::path& path, const ImageFeatureSpec& spec) {
  Image image = read_ppm(path);
  Dataset data = image_features(image, spec);
  return {std::move(data), std::move(image)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto '" + path.string() + "'");
  }
}

std::string format_labels(std::span<const PointId> labels) {
  std::string out;
  out.reserve(labels.size() * 4);
  for (PointId l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  return out;
}

}  // namespace lshqs
