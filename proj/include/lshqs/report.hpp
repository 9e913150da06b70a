#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lshqs/geometry.hpp"
#include "lshqs/quickshift.hpp"

namespace lshqs {

/// Parameters echoed into a report.
struct ReportParams {
  Real bandwidth = 0.0;
  Real c = 0.0;
  Real epsilon = 0.0;
  Real mu = 0.0;
  std::string estimator;  // "exact" or "hbe"
  bool exact_quickshift = false;
  std::uint64_t seed = 0;
  std::optional<std::size_t> lsh_tables;
  std::optional<std::size_t> lsh_concat;
  std::optional<Real> bucket_width;
  std::optional<Real> lambda;

  bool operator==(const ReportParams&) const = default;
};

struct SweepEntry {
  Real bandwidth = 0.0;
  std::size_t num_clusters = 0;
  double ari = 0.0;
  double ami = 0.0;

  bool operator==(const SweepEntry&) const = default;
};

/// Machine-readable summary of one command run, serialized as a single
/// JSON document. See README for the schema.
struct RunReport {
  std::string command;
  ReportParams params;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t num_clusters = 0;
  std::vector<PointId> mode_ids;            // roots, increasing id
  std::vector<std::vector<Real>> modes;     // coordinates of mode_ids
  std::vector<Real> mode_densities;
  StageTimings timings;
  std::optional<double> ari;
  std::optional<double> ami;
  std::vector<SweepEntry> sweep;
  std::optional<std::size_t> width;   // segment only
  std::optional<std::size_t> height;

  bool operator==(const RunReport& other) const;
};

/// Pretty-printed JSON with a trailing newline. Doubles are written in
/// shortest round-trip form, so parse_report(serialize_report(r)) == r.
/// With `mask_timings` every timing is written as 0.
std::string serialize_report(const RunReport& report, bool mask_timings = false);

/// Throws ParseError on malformed input.
RunReport parse_report(std::string_view text);

}  // namespace lshqs
