#include "lshqs/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "lshqs/io.hpp"
#include "lshqs/metrics.hpp"
#include "lshqs/report.hpp"
#include "lshqs/synthetic.hpp"

namespace lshqs {

namespace {

using Clock = std::chrono::steady_clock;

std::string shortest(Real v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Flags shared by every command that clusters a dataset.
struct CommonArgs {
  std::string input;
  std::string output;
  std::string report;
  std::optional<Real> bandwidth;
  Real c = 1.5;
  Real epsilon = 0.1;
  Real mu = kDefaultMu;
  std::string estimator = "hbe";
  bool exact = false;
  std::uint64_t seed = 0;
  std::optional<std::size_t> lsh_tables;
  std::optional<std::size_t> lsh_concat;
  std::optional<Real> bucket_width;

  QuickShiftConfig config(Real h) const {
    QuickShiftConfig cfg;
    cfg.bandwidth = h;
    cfg.approximation = c;
    cfg.epsilon = epsilon;
    cfg.mu = mu;
    cfg.estimator = estimator_from_string(estimator);
    cfg.seed = seed;
    cfg.lsh_tables = lsh_tables;
    cfg.lsh_concat = lsh_concat;
    cfg.bucket_width = bucket_width;
    cfg.validate();
    return cfg;
  }
};

void add_clustering_flags(CLI::App& cmd, CommonArgs& a, bool needs_bandwidth) {
  auto* bw = cmd.add_option("--bandwidth,-b", a.bandwidth, "Kernel bandwidth h, also the linking radius");
  if (needs_bandwidth) bw->required();
  cmd.add_option("--c", a.c, "Approximation factor c > 1; edges are at most c*h")->capture_default_str();
  cmd.add_option("--epsilon", a.epsilon, "Relative error target of the hbe estimator")->capture_default_str();
  cmd.add_option("--mu", a.mu, "Density floor of the hbe estimator")->capture_default_str();
  cmd.add_option("--estimator", a.estimator, "Density estimator")
      ->check(CLI::IsMember({"exact", "hbe"}))
      ->capture_default_str();
  cmd.add_flag("--exact", a.exact, "Run the quadratic exact Quick Shift instead of the LSH pipeline");
  cmd.add_option("--seed", a.seed, "Master seed")->capture_default_str();
  cmd.add_option("--lsh-tables", a.lsh_tables, "Number of LSH tables L");
  cmd.add_option("--lsh-concat", a.lsh_concat, "Projections per LSH key K");
  cmd.add_option("--bucket-width", a.bucket_width, "LSH bucket width w");
}

void add_io_flags(CLI::App& cmd, CommonArgs& a, const char* input_help, const char* output_help) {
  cmd.add_option("--input,-i", a.input, input_help)->required();
  cmd.add_option("--output,-o", a.output, output_help)->required();
  cmd.add_option("--report", a.report, "Write the JSON report here instead of stdout");
}

ReportParams echo_params(const CommonArgs& a, const QuickShiftForest& forest, bool exact) {
  ReportParams p;
  p.bandwidth = forest.config.bandwidth;
  p.c = exact ? forest.max_edge / forest.config.bandwidth : forest.config.approximation;
  p.epsilon = a.epsilon;
  p.mu = a.mu;
  p.estimator = exact ? "exact" : std::string(to_string(forest.config.estimator));
  p.exact_quickshift = exact;
  p.seed = a.seed;
  if (forest.lsh) {
    p.lsh_tables = forest.lsh->tables;
    p.lsh_concat = forest.lsh->concat;
    p.bucket_width = forest.lsh->bucket_width;
  }
  return p;
}

RunReport base_report(const std::string& command, const CommonArgs& a, const Dataset& data, const ClusterRun& run,
                      bool exact) {
  RunReport r;
  r.command = command;
  r.params = echo_params(a, run.forest, exact);
  r.n = data.size();
  r.d = data.dim();
  r.num_clusters = run.labels.num_clusters;
  const ModeSet modes = extract_modes(run.forest, data);
  r.mode_ids = modes.ids;
  for (std::size_t k = 0; k < modes.ids.size(); ++k) {
    const auto c = modes.coords[k].coords();
    r.modes.emplace_back(c.begin(), c.end());
    r.mode_densities.push_back(run.forest.densities.values[modes.ids[k]]);
  }
  r.timings = run.forest.timings;
  return r;
}

void emit_report(const RunReport& r, const std::string& path, std::ostream& out) {
  const std::string text = serialize_report(r);
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

int cmd_cluster(const CommonArgs& a, bool has_header, std::optional<std::size_t> labels_col,
                const std::string& sweep_text, std::ostream& out) {
  const Dataset data = load_csv(a.input, has_header, labels_col);
  std::vector<Real> grid;
  if (!sweep_text.empty()) {
    if (!data.labels()) throw std::invalid_argument("--sweep needs ground-truth labels (--labels-col)");
    grid = SweepRange::parse(sweep_text).values();
  } else {
    if (!a.bandwidth) throw std::invalid_argument("--bandwidth is required");
    grid = {*a.bandwidth};
  }

  std::optional<ClusterRun> best;
  std::optional<std::pair<double, double>> best_scores;
  std::vector<SweepEntry> sweep;
  for (Real h : grid) {
    ClusterRun run = run_clustering(data, a.config(h), a.exact);
    std::optional<std::pair<double, double>> scores;
    if (data.labels()) {
      const auto predicted = to_labels(run.labels.label);
      scores = std::pair{adjusted_rand_index(*data.labels(), predicted), adjusted_mutual_info(*data.labels(), predicted)};
    }
    if (!sweep_text.empty()) sweep.push_back({h, run.labels.num_clusters, scores->first, scores->second});
    // first grid point wins ties
    if (!best || (scores && scores->first > best_scores->first)) {
      best = std::move(run);
      best_scores = scores;
    }
  }

  RunReport r = base_report("cluster", a, data, *best, a.exact);
  if (best_scores) {
    r.ari = best_scores->first;
    r.ami = best_scores->second;
  }
  r.sweep = std::move(sweep);
  write_file_atomic(a.output, format_labels(best->labels.label));
  emit_report(r, a.report, out);
  return kExitOk;
}

int cmd_segment(const CommonArgs& a, Real lambda, std::ostream& out) {
  const LoadedImage loaded = load_ppm(a.input, ImageFeatureSpec{lambda});
  const ClusterRun run = run_clustering(loaded.data, a.config(*a.bandwidth), a.exact);

  const std::size_t n = loaded.data.size();
  std::vector<std::array<std::uint64_t, 4>> sums(n, {0, 0, 0, 0});
  for (PointId i = 0; i < n; ++i) {
    auto& s = sums[run.labels.label[i]];
    for (int ch = 0; ch < 3; ++ch) s[ch] += loaded.image.rgb[3 * i + ch];
    ++s[3];
  }
  Image segmented = loaded.image;
  for (PointId i = 0; i < n; ++i) {
    const auto& s = sums[run.labels.label[i]];
    for (int ch = 0; ch < 3; ++ch) segmented.rgb[3 * i + ch] = static_cast<std::uint8_t>((s[ch] + s[3] / 2) / s[3]);
  }

  RunReport r = base_report("segment", a, loaded.data, run, a.exact);
  r.params.lambda = lambda;
  r.width = loaded.image.width;
  r.height = loaded.image.height;
  write_ppm(a.output, segmented);
  emit_report(r, a.report, out);
  return kExitOk;
}

int cmd_modes(const CommonArgs& a, bool has_header, std::optional<std::size_t> labels_col, std::ostream& out) {
  const Dataset data = load_csv(a.input, has_header, labels_col);
  const ClusterRun run = run_clustering(data, a.config(*a.bandwidth), a.exact);
  const auto ordered = top_modes(run.forest, run.forest.size());

  std::string csv;
  for (std::size_t j = 0; j < data.dim(); ++j) csv += "x" + std::to_string(j) + ",";
  csv += "density\n";
  for (PointId id : ordered) {
    for (Real v : data.point(id)) csv += shortest(v) + ",";
    csv += shortest(run.forest.densities.values[id]) + "\n";
  }
  RunReport r = base_report("modes", a, data, run, a.exact);
  write_file_atomic(a.output, csv);
  emit_report(r, a.report, out);
  return kExitOk;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || v == 0)
      throw std::invalid_argument("--sizes: bad entry '" + item + "'");
    sizes.push_back(v);
  }
  if (sizes.empty()) throw std::invalid_argument("--sizes: empty list");
  return sizes;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quick Shift clustering driven by LSH-based kernel density estimates", "lshqs"};
  app.require_subcommand(1);

  CommonArgs cluster_args;
  bool cluster_header = false;
  std::optional<std::size_t> cluster_labels;
  std::string sweep;
  auto* cluster = app.add_subcommand("cluster", "Cluster the rows of a CSV file; writes one label per row");
  add_io_flags(*cluster, cluster_args, "CSV input", "Label file output");
  add_clustering_flags(*cluster, cluster_args, false);
  cluster->add_option("--labels-col", cluster_labels, "0-based column holding ground-truth labels");
  cluster->add_flag("--has-header", cluster_header, "Skip the first non-empty line");
  cluster->add_option("--sweep", sweep, "Grid H_MIN:H_MAX:STEPS over h; keeps the best ARI");

  CommonArgs segment_args;
  Real lambda = 0.2;
  auto* segment = app.add_subcommand("segment", "Segment a PPM image in (r,g,b,x,y) space");
  add_io_flags(*segment, segment_args, "PPM input (P3 or P6)", "PPM output with per-segment mean colours");
  add_clustering_flags(*segment, segment_args, true);
  segment->add_option("--lambda", lambda, "Spatial weight of the pixel coordinates")->capture_default_str();

  CommonArgs modes_args;
  bool modes_header = false;
  std::optional<std::size_t> modes_labels;
  auto* modes = app.add_subcommand("modes", "Write cluster modes with their densities, densest first");
  add_io_flags(*modes, modes_args, "CSV input", "Mode CSV output");
  add_clustering_flags(*modes, modes_args, true);
  modes->add_option("--labels-col", modes_labels, "0-based column to exclude from the features");
  modes->add_flag("--has-header", modes_header, "Skip the first non-empty line");

  CommonArgs bench_args;
  BenchOptions bench_opts;
  std::string sizes = "1000,2000,4000,8000";
  auto* bench = app.add_subcommand("bench", "Time the pipeline on synthetic mixtures of growing size");
  add_clustering_flags(*bench, bench_args, true);
  bench->add_option("--output,-o", bench_args.output, "CSV output (stdout when omitted)");
  bench->add_option("--dims", bench_opts.dims, "Dimension of the synthetic data")->capture_default_str();
  bench->add_option("--components", bench_opts.components, "Mixture components")->capture_default_str();
  bench->add_option("--sizes", sizes, "Comma-separated list of n")->capture_default_str();
  bench->add_option("--repeats", bench_opts.repeats, "Runs per n; the median total is kept")->capture_default_str();
  bench->add_option("--spread", bench_opts.spread, "Standard deviation of each component")->capture_default_str();
  bench->add_option("--center-scale", bench_opts.center_scale, "Centers are uniform in [-s, s]^d")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lshqs: " << e.what() << "\n";
    return kExitUsage;
  }

  if (cluster->parsed()) return cmd_cluster(cluster_args, cluster_header, cluster_labels, sweep, out);
  if (segment->parsed()) return cmd_segment(segment_args, lambda, out);
  if (modes->parsed()) return cmd_modes(modes_args, modes_header, modes_labels, out);

  bench_opts.sizes = parse_sizes(sizes);
  bench_opts.config = bench_args.config(*bench_args.bandwidth);
  bench_opts.exact_quickshift = bench_args.exact;
  const std::string csv = format_bench_csv(run_bench(bench_opts));
  if (bench_args.output.empty()) {
    out << csv;
  } else {
    write_file_atomic(bench_args.output, csv);
  }
  return kExitOk;
}

}  // namespace

SweepRange SweepRange::parse(std::string_view text) {
  SweepRange r;
  const std::size_t a = text.find(':');
  const std::size_t b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) throw std::invalid_argument("--sweep: expected H_MIN:H_MAX:STEPS");
  auto real = [](std::string_view s) {
    Real v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("--sweep: bad number '" + std::string(s) + "'");
    return v;
  };
  r.min = real(text.substr(0, a));
  r.max = real(text.substr(a + 1, b - a - 1));
  const std::string_view steps = text.substr(b + 1);
  auto [ptr, ec] = std::from_chars(steps.data(), steps.data() + steps.size(), r.steps);
  if (ec != std::errc() || ptr != steps.data() + steps.size() || r.steps == 0)
    throw std::invalid_argument("--sweep: STEPS must be a positive integer");
  if (!(r.min > 0.0) || !(r.max >= r.min) || !std::isfinite(r.max))
    throw std::invalid_argument("--sweep: need 0 < H_MIN <= H_MAX");
  return r;
}

std::vector<Real> SweepRange::values() const {
  if (steps == 1) return {min};
  std::vector<Real> out;
  for (std::size_t k = 0; k < steps; ++k) {
    out.push_back(min + (max - min) * static_cast<Real>(k) / static_cast<Real>(steps - 1));
  }
  return out;
}

ClusterRun run_clustering(const Dataset& data, const QuickShiftConfig& cfg, bool exact_quickshift) {
  ClusterRun run{exact_quickshift ? lshqs::exact_quickshift(data, cfg.bandwidth, cfg.max_edge())
                                  : lsh_quickshift(data, cfg),
                 {}};
  const auto start = Clock::now();
  run.labels = extract_labels(run.forest);
  run.forest.timings.label_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  const auto violations = verify_forest(data, run.forest);
  if (!violations.empty()) throw InvariantViolation(violations.front());
  return run;
}

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
  if (opts.repeats == 0) throw std::invalid_argument("bench: repeats must be >= 1");
  const SeedSpec seeds{opts.config.seed};
  const auto centers =
      random_centers(opts.components, opts.dims, opts.center_scale, derive_seed(seeds, "bench-centers", 0));
  std::vector<BenchRow> rows;
  for (std::size_t n : opts.sizes) {
    const Dataset data = gaussian_mixture(centers, opts.spread, n, derive_seed(seeds, "bench-data", n));
    std::vector<StageTimings> runs;
    for (std::size_t r = 0; r < opts.repeats; ++r) {
      runs.push_back(run_clustering(data, opts.config, opts.exact_quickshift).forest.timings);
    }
    std::sort(runs.begin(), runs.end(),
              [](const StageTimings& x, const StageTimings& y) { return x.total_ms() < y.total_ms(); });
    rows.push_back({n, runs[runs.size() / 2]});
  }
  return rows;
}

std::string format_bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "n,build_ms,kde_ms,graph_ms,total_ms\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.timings.build_ms << ',' << row.timings.kde_ms << ',' << row.timings.graph_ms << ','
        << row.timings.total_ms() << '\n';
  }
  return out.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(argc, argv, out, err);
  } catch (const ParseError& e) {
    err << "lshqs: " << e.what() << "\n";
    return kExitInput;
  } catch (const InvariantViolation& e) {
    err << "lshqs: invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::invalid_argument& e) {
    err << "lshqs: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "lshqs: " << e.what() << "\n";
    return kExitInput;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"lshqs"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lshqs
