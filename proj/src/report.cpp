#include "lshqs/report.hpp"

#include <json.hpp>

namespace lshqs {

namespace {

using nlohmann::json;

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

bool RunReport::operator==(const RunReport& o) const {
  return command == o.command && params == o.params && n == o.n && d == o.d && num_clusters == o.num_clusters &&
         mode_ids == o.mode_ids && modes == o.modes && mode_densities == o.mode_densities &&
         timings.build_ms == o.timings.build_ms && timings.kde_ms == o.timings.kde_ms &&
         timings.graph_ms == o.timings.graph_ms && timings.label_ms == o.timings.label_ms && ari == o.ari &&
         ami == o.ami && sweep == o.sweep && width == o.width && height == o.height;
}

std::string serialize_report(const RunReport& r, bool mask_timings) {
  json params = {
      {"bandwidth", r.params.bandwidth},
      {"c", r.params.c},
      {"epsilon", r.params.epsilon},
      {"mu", r.params.mu},
      {"estimator", r.params.estimator},
      {"exact_quickshift", r.params.exact_quickshift},
      {"seed", r.params.seed},
      {"lsh_tables", optional_json(r.params.lsh_tables)},
      {"lsh_concat", optional_json(r.params.lsh_concat)},
      {"bucket_width", optional_json(r.params.bucket_width)},
      {"lambda", optional_json(r.params.lambda)},
  };
  const StageTimings t = mask_timings ? StageTimings{} : r.timings;
  json timings = {
      {"build_ms", t.build_ms},
      {"kde_ms", t.kde_ms},
      {"graph_ms", t.graph_ms},
      {"label_ms", t.label_ms},
  };
  json sweep = json::array();
  for (const auto& e : r.sweep) {
    sweep.push_back({{"bandwidth", e.bandwidth}, {"num_clusters", e.num_clusters}, {"ari", e.ari}, {"ami", e.ami}});
  }
  json doc = {
      {"command", r.command},
      {"params", params},
      {"n", r.n},
      {"d", r.d},
      {"num_clusters", r.num_clusters},
      {"mode_ids", r.mode_ids},
      {"modes", r.modes},
      {"mode_densities", r.mode_densities},
      {"timings", timings},
      {"ari", optional_json(r.ari)},
      {"ami", optional_json(r.ami)},
      {"sweep", sweep},
      {"width", optional_json(r.width)},
      {"height", optional_json(r.height)},
  };
  return doc.dump(2) + "\n";
}

RunReport parse_report(std::string_view text) {
  try {
    const json doc = json::parse(text);
    RunReport r;
    r.command = doc.at("command").get<std::string>();
    const json& p = doc.at("params");
    r.params.bandwidth = p.at("bandwidth").get<Real>();
    r.params.c = p.at("c").get<Real>();
    r.params.epsilon = p.at("epsilon").get<Real>();
    r.params.mu = p.at("mu").get<Real>();
    r.params.estimator = p.at("estimator").get<std::string>();
    r.params.exact_quickshift = p.at("exact_quickshift").get<bool>();
    r.params.seed = p.at("seed").get<std::uint64_t>();
    r.params.lsh_tables = optional_from<std::size_t>(p, "lsh_tables");
    r.params.lsh_concat = optional_from<std::size_t>(p, "lsh_concat");
    r.params.bucket_width = optional_from<Real>(p, "bucket_width");
    r.params.lambda = optional_from<Real>(p, "lambda");
    r.n = doc.at("n").get<std::size_t>();
    r.d = doc.at("d").get<std::size_t>();
    r.num_clusters = doc.at("num_clusters").get<std::size_t>();
    r.mode_ids = doc.at("mode_ids").get<std::vector<PointId>>();
    r.modes = doc.at("modes").get<std::vector<std::vector<Real>>>();
    r.mode_densities = doc.at("mode_densities").get<std::vector<Real>>();
    const json& t = doc.at("timings");
    r.timings.build_ms = t.at("build_ms").get<double>();
    r.timings.kde_ms = t.at("kde_ms").get<double>();
    r.timings.graph_ms = t.at("graph_ms").get<double>();
    r.timings.label_ms = t.at("label_ms").get<double>();
    r.ari = optional_from<double>(doc, "ari");
    r.ami = optional_from<double>(doc, "ami");
    for (const json& e : doc.at("sweep")) {
      r.sweep.push_back({e.at("bandwidth").get<Real>(), e.at("num_clusters").get<std::size_t>(),
                         e.at("ari").get<double>(), e.at("ami").get<double>()});
    }
    r.width = optional_from<std::size_t>(doc, "width");
    r.height = optional_from<std::size_t>(doc, "height");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

}  // namespace lshqs
