// Acceptance suite: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Exits 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lshqs/commands.hpp"
#include "lshqs/io.hpp"
#include "lshqs/metrics.hpp"
#include "lshqs/quickshift.hpp"
#include "lshqs/report.hpp"
#include "lshqs/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lshqs;
using lshqs::testing::read_text;
using lshqs::testing::TempDir;
using lshqs::testing::write_text;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Forest invariant tally shared by every criterion that builds a forest.
struct ForestTally {
  std::size_t forests = 0;
  std::size_t violations = 0;
  std::string first;
};
ForestTally tally;

void audit(const Dataset& data, const QuickShiftForest& forest) {
  const auto v = verify_forest(data, forest);
  ++tally.forests;
  tally.violations += v.size();
  if (!v.empty() && tally.first.empty()) tally.first = v.front();
}

QuickShiftForest audited_lsh(const Dataset& data, const QuickShiftConfig& cfg) {
  QuickShiftForest f = lsh_quickshift(data, cfg);
  audit(data, f);
  return f;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string dataset_csv(const Dataset& d) {
  std::ostringstream s;
  s.precision(17);
  for (PointId i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.dim(); ++j) s << (j ? "," : "") << d.point(i)[j];
    if (d.labels()) s << "," << (*d.labels())[i];
    s << "\n";
  }
  return s.str();
}

Outcome oracle_equivalence() {
  std::size_t same = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Dataset d = lshqs::testing::random_small_dataset(1000 * seed + k);
      QuickShiftConfig cfg;
      cfg.bandwidth = 0.25 + 0.05 * static_cast<Real>(k % 10);
      cfg.estimator = EstimatorKind::exact;
      cfg.neighbor_search = NeighborSearch::exact_ball;
      cfg.seed = seed;
      const auto lsh = audited_lsh(d, cfg);
      const auto ref = exact_quickshift(d, cfg.bandwidth, cfg.max_edge());
      audit(d, ref);
      ++total;
      same += lsh.parent == ref.parent;
    }
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " forests identical node for node"};
}

Outcome kde_accuracy() {
  const Dataset d = gaussian_mixture({Point{0.0, 0.0}, Point{6.0, 0.0}}, 1.0, 2000, 11);
  const KernelSpec kernel{0.7};
  const Real eps = 0.2, mu = 0.01;
  const auto est = HbeEstimator::build(d, kernel, eps, mu, 3);
  Engine engine(derive_seed(SeedSpec{3}, "acceptance-queries", 0));
  std::size_t asked = 0, good = 0;
  while (asked < 200) {
    const PointId i = static_cast<PointId>(uniform_index(engine(), d.size()));
    const Real exact = exact_kde(d, d.point(i), kernel);
    if (exact < mu) continue;
    const Real approx = est.estimate(d, d.point(i), derive_seed(SeedSpec{3}, "acceptance-stream", asked));
    ++asked;
    good += std::fabs(approx - exact) <= eps * exact;
  }
  const double frac = static_cast<double>(good) / static_cast<double>(asked);
  return {frac >= 0.95, std::to_string(good) + "/200 queries within 0.2 relative error (" + fmt("%.3f", frac) +
                            " >= 0.95)"};
}

Outcome separation() {
  const Real h = 0.5;
  const std::size_t per_blob = 200;
  std::vector<PointId> a(per_blob), b(per_blob);
  for (PointId i = 0; i < per_blob; ++i) {
    a[i] = i;
    b[i] = per_blob + i;
  }
  std::size_t ok = 0, total = 0;
  for (EstimatorKind kind : {EstimatorKind::exact, EstimatorKind::hbe}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Dataset d = lshqs::testing::valley_instance(h, per_blob, seed);
      QuickShiftConfig cfg;
      cfg.bandwidth = h;
      cfg.estimator = kind;
      cfg.seed = seed;
      const auto f = audited_lsh(d, cfg);
      ++total;
      ok += check_separation(extract_labels(f), a, b);
    }
  }
  return {ok == total,
          std::to_string(ok) + "/" + std::to_string(total) + " runs with disjoint root sets (10 seeds, both estimators)"};
}

Outcome mode_recovery() {
  const std::vector<Point> truth{Point{0.0, 0.0}, Point{6.0, 0.0}};
  auto distance = [&](std::size_t n, std::uint64_t seed) {
    const Dataset d = gaussian_mixture(truth, 1.0, n, seed);
    QuickShiftConfig cfg;
    cfg.bandwidth = 0.7;
    cfg.estimator = EstimatorKind::exact;
    cfg.seed = seed;
    const auto f = audited_lsh(d, cfg);
    std::vector<Point> found;
    for (PointId id : top_modes(f, 2)) found.push_back(d.point_copy(id));
    return found.size() == 2 ? hausdorff_distance(found, truth) : std::numeric_limits<double>::infinity();
  };
  const double at4000 = distance(4000, 1);
  std::vector<double> small, large;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    small.push_back(distance(500, seed));
    large.push_back(distance(8000, seed));
  }
  const double m_small = median(small), m_large = median(large);
  const bool pass = at4000 <= 0.5 && m_large <= m_small;
  return {pass, "n=4000 hausdorff " + fmt("%.4f", at4000) + " <= 0.5; median n=8000 " + fmt("%.4f", m_large) +
                    " <= median n=500 " + fmt("%.4f", m_small)};
}

Outcome iris_anchor() {
  TempDir dir("acc-iris");
  const std::string iris = std::string(LSHQS_TEST_DATA) + "/iris.csv";
  auto sweep = [&](const std::string& estimator) -> std::optional<RunReport> {
    const CliResult r = cli({"cluster", "-i", iris, "-o", dir.file(estimator + ".txt"), "--labels-col", "4",
                             "--estimator", estimator, "--sweep", "0.3:1.5:13"});
    if (r.code != kExitOk) return std::nullopt;
    return parse_report(r.out);
  };
  const auto exact = sweep("exact");
  const auto hbe = sweep("hbe");
  if (!exact || !hbe || !exact->ari || !exact->ami || !hbe->ari) return {false, "cluster command failed"};
  const double gap = std::fabs(*exact->ari - *hbe->ari);
  const bool pass = *exact->ari >= 0.5 && *exact->ami >= 0.6 && gap <= 0.15;
  return {pass, "exact ARI " + fmt("%.4f", *exact->ari) + " >= 0.50, AMI " + fmt("%.4f", *exact->ami) +
                    " >= 0.60; hbe ARI " + fmt("%.4f", *hbe->ari) + ", gap " + fmt("%.4f", gap) + " <= 0.15"};
}

std::optional<std::vector<double>> bench_totals(const std::vector<std::string>& extra) {
  std::vector<std::string> args{"bench", "--dims", "8", "--sizes", "1000,2000,4000,8000", "--repeats", "3", "-b", "1.0"};
  args.insert(args.end(), extra.begin(), extra.end());
  const CliResult r = cli(args);
  if (r.code != kExitOk) return std::nullopt;
  const Dataset table = parse_csv(r.out, true, std::nullopt);
  std::vector<double> totals;
  for (PointId i = 0; i < table.size(); ++i) totals.push_back(table.point(i)[4]);
  return totals;
}

Outcome scaling() {
  const auto hbe = bench_totals({"--epsilon", "0.25", "--mu", "0.1"});
  const auto exact = bench_totals({"--exact"});
  if (!hbe || !exact || hbe->size() != 4 || exact->size() != 4) return {false, "bench command failed"};
  std::string detail = "hbe doubling ratios";
  bool pass = true;
  for (std::size_t k = 1; k < 4; ++k) {
    const double ratio = (*hbe)[k] / (*hbe)[k - 1];
    pass = pass && ratio <= 2.6;
    detail += " " + fmt("%.2f", ratio);
  }
  const double last = (*exact)[3] / (*exact)[2];
  pass = pass && last >= 3.0;
  detail += " (each <= 2.6); exact 4000->8000 ratio " + fmt("%.2f", last) + " >= 3.0";
  return {pass, detail};
}

Outcome metrics_oracles() {
  double worst_ari = 0.0, worst_ami = 0.0;
  std::size_t pairs = 0;
  auto compare = [&](const std::vector<Label>& a, const std::vector<Label>& b) {
    worst_ari = std::max(worst_ari, std::fabs(adjusted_rand_index(a, b) - oracle::pair_counting_ari(a, b)));
    worst_ami = std::max(worst_ami, std::fabs(adjusted_mutual_info(a, b) - oracle::direct_ami(a, b)));
    ++pairs;
  };
  for (std::size_t n : {4, 5, 6}) {
    const auto parts = oracle::set_partitions(n);
    for (const auto& a : parts) {
      for (const auto& b : parts) compare(a, b);
    }
  }
  Engine engine(derive_seed(SeedSpec{8}, "acceptance-labels", 0));
  for (std::size_t n = 7; n <= 8; ++n) {
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<Label> a(n), b(n);
      const std::size_t ka = 1 + uniform_index(engine(), n), kb = 1 + uniform_index(engine(), n);
      for (auto& v : a) v = static_cast<Label>(uniform_index(engine(), ka));
      for (auto& v : b) v = static_cast<Label>(uniform_index(engine(), kb));
      compare(a, b);
    }
  }
  std::size_t hausdorff_equal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + uniform_index(engine(), 5);
    auto draw = [&](std::size_t count) {
      std::vector<Point> s;
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<Real> c(dim);
        for (auto& v : c) v = standard_normal(engine) * 3.0;
        s.emplace_back(std::move(c));
      }
      return s;
    };
    const auto a = draw(1 + uniform_index(engine(), 40));
    const auto b = draw(1 + uniform_index(engine(), 40));
    hausdorff_equal += hausdorff_distance(a, b) == oracle::double_loop_hausdorff(a, b);
  }
  const bool pass = worst_ari <= 1e-12 && worst_ami <= 1e-12 && hausdorff_equal == 100;
  return {pass, std::to_string(pairs) + " labeling pairs, max |dARI| " + fmt("%.2e", worst_ari) + ", max |dAMI| " +
                    fmt("%.2e", worst_ami) + " (<= 1e-12); hausdorff exact on " + std::to_string(hausdorff_equal) +
                    "/100"};
}

Outcome determinism() {
  TempDir dir("acc-det");
  const Dataset d = gaussian_mixture({Point{0.0, 0.0}, Point{5.0, 1.0}, Point{1.0, 5.0}}, 1.0, 600, 21);
  write_text(dir.file("in.csv"), dataset_csv(d));
  Image img{48, 32, {}};
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t c = 0; c < img.width; ++c) {
      const std::uint8_t v = static_cast<std::uint8_t>((c < img.width / 2 ? 60 : 190) + (r * 7 + c * 13) % 9);
      img.rgb.insert(img.rgb.end(), {v, static_cast<std::uint8_t>(255 - v), 90});
    }
  }
  write_ppm(dir.file("in.ppm"), img);

  std::vector<std::string> mismatches;
  auto twice = [&](const std::string& name, const std::function<std::vector<std::string>(const std::string&)>& args,
                   const std::string& output) {
    const CliResult a = cli(args("a"));
    const CliResult b = cli(args("b"));
    if (a.code != kExitOk || b.code != kExitOk) {
      mismatches.push_back(name + " failed");
      return;
    }
    if (read_text(dir.file("a" + output)) != read_text(dir.file("b" + output))) mismatches.push_back(name + " output");
    if (serialize_report(parse_report(a.out), true) != serialize_report(parse_report(b.out), true)) {
      mismatches.push_back(name + " report");
    }
  };
  twice("cluster", [&](const std::string& t) {
    return std::vector<std::string>{"cluster", "-i", dir.file("in.csv"), "-o", dir.file(t + ".txt"), "-b", "0.8",
                                    "--labels-col", "2", "--seed", "42"};
  }, ".txt");
  twice("cluster-sweep", [&](const std::string& t) {
    return std::vector<std::string>{"cluster", "-i", dir.file("in.csv"), "-o", dir.file(t + "s.txt"), "--sweep",
                                    "0.5:1.0:3", "--labels-col", "2", "--seed", "42"};
  }, "s.txt");
  twice("segment", [&](const std::string& t) {
    return std::vector<std::string>{"segment", "-i", dir.file("in.ppm"), "-o", dir.file(t + ".ppm"), "-b", "0.3",
                                    "--epsilon", "0.3", "--seed", "42"};
  }, ".ppm");
  twice("modes", [&](const std::string& t) {
    return std::vector<std::string>{"modes", "-i", dir.file("in.csv"), "-o", dir.file(t + ".csv"), "-b", "0.8",
                                    "--seed", "42"};
  }, ".csv");
  if (mismatches.empty()) return {true, "cluster, cluster --sweep, segment and modes reruns byte-identical"};
  std::string detail = "mismatch:";
  for (const auto& m : mismatches) detail += " " + m;
  return {false, detail};
}

Outcome forest_invariants() {
  // every forest built by the other criteria has already been audited; add
  // the hbe pipeline on the random suite and the exact-density LSH filter
  for (std::uint64_t k = 0; k < 20; ++k) {
    const Dataset d = lshqs::testing::random_small_dataset(500 + k);
    QuickShiftConfig cfg;
    cfg.bandwidth = 0.3 + 0.05 * static_cast<Real>(k % 8);
    cfg.seed = k;
    audited_lsh(d, cfg);
    cfg.estimator = EstimatorKind::exact;
    audited_lsh(d, cfg);
  }
  const bool pass = tally.violations == 0;
  std::string detail = std::to_string(tally.violations) + " violations across " + std::to_string(tally.forests) +
                       " forests";
  if (!pass) detail += " (first: " + tally.first + ")";
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double limit_s;  // 0 when there is no runtime limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence, 10.0},
      {3, "kde accuracy", kde_accuracy, 30.0},
      {4, "separation", separation, 10.0},
      {5, "mode recovery", mode_recovery, 60.0},
      {6, "iris anchor", iris_anchor, 30.0},
      {7, "near-linear scaling", scaling, 0.0},
      {8, "metrics correctness", metrics_oracles, 0.0},
      {9, "determinism", determinism, 0.0},
      // last, so it covers the forests built above
      {2, "forest invariants", forest_invariants, 0.0},
  };

  struct Line {
    int id;
    std::string text;
    bool pass;
  };
  std::vector<Line> lines;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = fmt("%.2f s", secs);
    if (c.limit_s > 0.0) {
      pass = pass && secs < c.limit_s;
      timing += fmt(" < %.0f s", c.limit_s);
    }
    const std::string text = std::string(pass ? "PASS" : "FAIL") + " " + std::to_string(c.id) + " " + c.name + ": " +
                             o.detail + " [" + timing + "]";
    std::cerr << text << std::endl;
    lines.push_back({c.id, text, pass});
  }

  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  std::size_t failed = 0;
  for (const auto& l : lines) {
    std::cout << l.text << "\n";
    failed += !l.pass;
  }
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << std::endl;
  return failed == 0 ? 0 : 1;
}
