#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lshqs/geometry.hpp"
#include "lshqs/quickshift.hpp"

namespace lshqs {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitInvariant = 3,
};

/// Entry point of the `lshqs` tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Inclusive grid H_MIN:H_MAX:STEPS.
struct SweepRange {
  Real min = 0.0;
  Real max = 0.0;
  std::size_t steps = 1;

  /// Throws std::invalid_argument on bad syntax or values.
  static SweepRange parse(std::string_view text);
  std::vector<Real> values() const;
};

/// One clustering run: forest, labels and label timing, with the forest
/// invariants checked. Throws InvariantViolation when the check fails.
struct ClusterRun {
  QuickShiftForest forest;
  ClusterLabels labels;
};

ClusterRun run_clustering(const Dataset& data, const QuickShiftConfig& cfg, bool exact_quickshift);

struct BenchOptions {
  std::size_t dims = 8;
  std::size_t components = 5;
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::size_t repeats = 3;
  Real spread = 1.0;
  Real center_scale = 6.0;
  QuickShiftConfig config;
  bool exact_quickshift = false;
};

struct BenchRow {
  std::size_t n = 0;
  StageTimings timings;  // the run with the median total among the repeats
};

std::vector<BenchRow> run_bench(const BenchOptions& options);
/// CSV with header n,build_ms,kde_ms,graph_ms,total_ms.
std::string format_bench_csv(const std::vector<BenchRow>& rows);

}  // namespace lshqs
