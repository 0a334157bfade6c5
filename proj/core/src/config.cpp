#include "edm/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <iterator>

#include <fmt/format.h>

#include "edm/error.hpp"
#include "edm/fingerprint.hpp"
#include "json_io.hpp"

namespace edm {
namespace {

using detail::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::kInvalidConfig, msg); }

const json& section(const json& parent, std::string_view key, std::string_view where) {
  static const json kEmpty = json::object();
  auto it = parent.find(key);
  if (it == parent.end()) return kEmpty;
  if (!it->is_object()) fail(fmt::format("{}.{} must be an object", where, key));
  return *it;
}

void allow_keys(const json& obj, std::initializer_list<std::string_view> keys, std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      fail(fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

std::uint64_t get_count(const json& obj, std::string_view key, std::uint64_t fallback,
                        std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) fail(fmt::format("{}.{} must be a non-negative integer", where, key));
  return it->get<std::uint64_t>();
}

double get_number(const json& obj, std::string_view key, double fallback, std::string_view where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) fail(fmt::format("{}.{} must be a number", where, key));
  return it->get<double>();
}

synth::Range get_range(const json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(fmt::format("{} must be [min, max]", where));
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

FeatureSchema parse_schema(const json& ds) {
  const auto defaults = FeatureSchema::student_default();
  std::vector<FeatureSpec> features = defaults.features();
  const json& overrides = section(ds, "features", "dataset");
  for (const auto& [name, body] : overrides.items()) {
    auto it = std::find_if(features.begin(), features.end(),
                           [&](const FeatureSpec& f) { return f.name == name; });
    if (it == features.end()) fail(fmt::format("dataset.features: unknown column '{}'", name));
    if (!body.is_object()) fail(fmt::format("dataset.features.{} must be an object", name));
    allow_keys(body, {"range", "categories"}, "dataset.features." + name);
    if (body.contains("range")) {
      if (it->kind != FeatureKind::kNumeric) fail(fmt::format("'{}' has no numeric range", name));
      auto r = get_range(body.at("range"), "dataset.features." + name + ".range");
      it->range = {r.min, r.max};
    }
    if (body.contains("categories")) {
      if (it->kind != FeatureKind::kCategorical) fail(fmt::format("'{}' has no categories", name));
      it->categories = detail::get_or<std::vector<std::string>>(body, "categories", {}, "dataset.features." + name);
    }
  }
  return FeatureSchema(std::move(features),
                       detail::get_or<std::string>(ds, "label", defaults.label(), "dataset"),
                       detail::get_or<std::vector<std::string>>(ds, "required", defaults.required(), "dataset"));
}

}  // namespace

BandMap default_bands() {
  BandMap bands;
  bands.emplace(columns::kGpa, BandSpec{{"low", 0.0, 2.5}, {"medium", 2.5, 3.0}, {"high", 3.0, 4.0}});
  bands.emplace(columns::kAttendance,
                BandSpec{{"low", 0.0, 60.0}, {"medium", 60.0, 85.0}, {"high", 85.0, 100.0}});
  for (auto column : {columns::kQuiz, columns::kAssignment, columns::kDiscussion, columns::kLab}) {
    bands.emplace(column, BandSpec{{"low", 0.0, 60.0}, {"medium", 60.0, 80.0}, {"high", 80.0, 100.0}});
  }
  return bands;
}

ToolkitConfig::ToolkitConfig() : bands(default_bands()) {}

ToolkitConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!doc.is_object()) fail("config must be a JSON object");
  allow_keys(doc, {"seed", "dataset", "synth", "kmeans", "nbayes", "hierarchy"}, "config");

  ToolkitConfig cfg;
  cfg.seed = get_count(doc, "seed", cfg.seed, "config");

  const json& ds = section(doc, "dataset", "config");
  allow_keys(ds, {"label", "required", "features", "bands"}, "dataset");
  cfg.schema = parse_schema(ds);
  if (ds.contains("bands")) {
    const json& bands = section(ds, "bands", "dataset");
    cfg.bands.clear();
    for (const auto& [name, spec] : bands.items()) cfg.bands.emplace(name, detail::bands_from_json(spec));
  }
  try {
    discretize(Dataset(cfg.schema, {}), cfg.bands);
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("dataset.bands: {}", e.what()));
  }

  const json& sy = section(doc, "synth", "config");
  allow_keys(sy, {"n_records", "missing_cells", "stage1_removals", "stage2_removals", "gpa_ranges",
                  "score_tiers", "stage1_columns", "stage2_columns"},
             "synth");
  auto& s = cfg.synth;
  s.seed = cfg.seed;
  s.n_records = get_count(sy, "n_records", s.n_records, "synth");
  s.missing_cells = get_count(sy, "missing_cells", s.missing_cells, "synth");
  s.stage1_removals = get_count(sy, "stage1_removals", s.stage1_removals, "synth");
  s.stage2_removals = get_count(sy, "stage2_removals", s.stage2_removals, "synth");
  if (sy.contains("gpa_ranges")) {
    const auto& arr = sy.at("gpa_ranges");
    if (!arr.is_array() || arr.size() != 4) fail("synth.gpa_ranges needs one [min, max] per year 1..4");
    for (std::size_t y = 0; y < 4; ++y) s.gpa_ranges[y] = get_range(arr[y], fmt::format("synth.gpa_ranges[{}]", y));
  }
  if (sy.contains("score_tiers")) {
    const auto& arr = sy.at("score_tiers");
    if (!arr.is_array() || arr.size() != 3) fail("synth.score_tiers needs three [min, max] ranges");
    for (std::size_t t = 0; t < 3; ++t) s.score_tiers[t] = get_range(arr[t], fmt::format("synth.score_tiers[{}]", t));
  }
  // Unless given, stage-1 columns are the schema's required data columns and
  // stage-2 columns are the rest.
  std::vector<std::string> required_data;
  std::vector<std::string> optional_data;
  for (auto column : data_columns()) {
    (cfg.schema.is_required(column) ? required_data : optional_data).emplace_back(column);
  }
  s.stage1_columns = detail::get_or<std::vector<std::string>>(sy, "stage1_columns", required_data, "synth");
  s.stage2_columns = detail::get_or<std::vector<std::string>>(sy, "stage2_columns", optional_data, "synth");
  s.validate();

  const json& km = section(doc, "kmeans", "config");
  allow_keys(km, {"k", "max_iter", "tol", "restarts", "standardize"}, "kmeans");
  auto& c = cfg.cluster;
  c.k = get_count(km, "k", c.k, "kmeans");
  c.max_iter = get_count(km, "max_iter", c.max_iter, "kmeans");
  c.tol = get_number(km, "tol", c.tol, "kmeans");
  c.restarts = get_count(km, "restarts", c.restarts, "kmeans");
  c.standardize = detail::get_or<bool>(km, "standardize", c.standardize, "kmeans");
  if (c.k == 0) fail("kmeans.k must be at least 1");
  if (c.restarts == 0) fail("kmeans.restarts must be at least 1");
  if (c.max_iter == 0) fail("kmeans.max_iter must be at least 1");
  if (!(c.tol >= 0.0)) fail("kmeans.tol must be >= 0");

  const json& nb = section(doc, "nbayes", "config");
  allow_keys(nb, {"alpha", "variance_floor", "train_fraction", "discretize"}, "nbayes");
  auto& n = cfg.classifier;
  n.fit.alpha = get_number(nb, "alpha", n.fit.alpha, "nbayes");
  n.fit.variance_floor = get_number(nb, "variance_floor", n.fit.variance_floor, "nbayes");
  n.train_fraction = get_number(nb, "train_fraction", n.train_fraction, "nbayes");
  n.discretize = detail::get_or<bool>(nb, "discretize", n.discretize, "nbayes");
  if (!(n.fit.alpha >= 0.0)) fail("nbayes.alpha must be >= 0");
  if (!(n.fit.variance_floor > 0.0)) fail("nbayes.variance_floor must be > 0");
  if (!(n.train_fraction > 0.0 && n.train_fraction < 1.0)) fail("nbayes.train_fraction must be in (0, 1)");

  const json& hi = section(doc, "hierarchy", "config");
  allow_keys(hi, {"knowledge_weights", "punctuality_thresholds", "performance_weights",
                  "overall_weights", "level_encoding", "level_cutoffs"},
             "hierarchy");
  auto& h = cfg.hierarchy;
  {
    const json& j = section(hi, "knowledge_weights", "hierarchy");
    allow_keys(j, {"quiz", "assignment", "discussion", "lab"}, "hierarchy.knowledge_weights");
    auto& w = h.knowledge_weights;
    w.quiz = get_number(j, "quiz", w.quiz, "hierarchy.knowledge_weights");
    w.assignment = get_number(j, "assignment", w.assignment, "hierarchy.knowledge_weights");
    w.discussion = get_number(j, "discussion", w.discussion, "hierarchy.knowledge_weights");
    w.lab = get_number(j, "lab", w.lab, "hierarchy.knowledge_weights");
  }
  {
    const json& j = section(hi, "punctuality_thresholds", "hierarchy");
    allow_keys(j, {"low", "high"}, "hierarchy.punctuality_thresholds");
    auto& t = h.punctuality_thresholds;
    t.low = get_number(j, "low", t.low, "hierarchy.punctuality_thresholds");
    t.high = get_number(j, "high", t.high, "hierarchy.punctuality_thresholds");
  }
  {
    const json& j = section(hi, "performance_weights", "hierarchy");
    allow_keys(j, {"knowledge", "punctuality"}, "hierarchy.performance_weights");
    auto& w = h.performance_weights;
    w.knowledge = get_number(j, "knowledge", w.knowledge, "hierarchy.performance_weights");
    w.punctuality = get_number(j, "punctuality", w.punctuality, "hierarchy.performance_weights");
  }
  {
    const json& j = section(hi, "overall_weights", "hierarchy");
    allow_keys(j, {"performance", "coaching"}, "hierarchy.overall_weights");
    auto& w = h.overall_weights;
    w.performance = get_number(j, "performance", w.performance, "hierarchy.overall_weights");
    w.coaching = get_number(j, "coaching", w.coaching, "hierarchy.overall_weights");
  }
  {
    const json& j = section(hi, "level_encoding", "hierarchy");
    allow_keys(j, {"low", "medium", "high"}, "hierarchy.level_encoding");
    auto& e = h.level_encoding;
    e.low = get_number(j, "low", e.low, "hierarchy.level_encoding");
    e.medium = get_number(j, "medium", e.medium, "hierarchy.level_encoding");
    e.high = get_number(j, "high", e.high, "hierarchy.level_encoding");
  }
  {
    const json& j = section(hi, "level_cutoffs", "hierarchy");
    allow_keys(j, {"medium", "high"}, "hierarchy.level_cutoffs");
    auto& lc = h.level_cutoffs;
    lc.medium = get_number(j, "medium", lc.medium, "hierarchy.level_cutoffs");
    lc.high = get_number(j, "high", lc.high, "hierarchy.level_cutoffs");
  }
  h.validate();
  return cfg;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot read config file '{}'", path.string()));
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_config(text);
}

std::string to_json(const ToolkitConfig& cfg) {
  json features = json::object();
  for (const auto& f : cfg.schema.features()) {
    if (f.kind == FeatureKind::kCategorical) {
      features[f.name] = {{"categories", f.categories}};
    } else {
      features[f.name] = {{"range", {f.range.min, f.range.max}}};
    }
  }
  json bands = json::object();
  for (const auto& [name, spec] : cfg.bands) bands[name] = detail::to_json(spec);

  const auto& s = cfg.synth;
  json gpa = json::array();
  for (const auto& r : s.gpa_ranges) gpa.push_back({r.min, r.max});
  json tiers = json::array();
  for (const auto& r : s.score_tiers) tiers.push_back({r.min, r.max});

  const auto& h = cfg.hierarchy;
  json doc = {
      {"seed", cfg.seed},
      {"dataset",
       {{"label", cfg.schema.label()},
        {"required", cfg.schema.required()},
        {"features", std::move(features)},
        {"bands", std::move(bands)}}},
      {"synth",
       {{"n_records", s.n_records},
        {"missing_cells", s.missing_cells},
        {"stage1_removals", s.stage1_removals},
        {"stage2_removals", s.stage2_removals},
        {"gpa_ranges", std::move(gpa)},
        {"score_tiers", std::move(tiers)},
        {"stage1_columns", s.stage1_columns},
        {"stage2_columns", s.stage2_columns}}},
      {"kmeans",
       {{"k", cfg.cluster.k},
        {"max_iter", cfg.cluster.max_iter},
        {"tol", cfg.cluster.tol},
        {"restarts", cfg.cluster.restarts},
        {"standardize", cfg.cluster.standardize}}},
      {"nbayes",
       {{"alpha", cfg.classifier.fit.alpha},
        {"variance_floor", cfg.classifier.fit.variance_floor},
        {"train_fraction", cfg.classifier.train_fraction},
        {"discretize", cfg.classifier.discretize}}},
      {"hierarchy",
       {{"knowledge_weights",
         {{"quiz", h.knowledge_weights.quiz},
          {"assignment", h.knowledge_weights.assignment},
          {"discussion", h.knowledge_weights.discussion},
          {"lab", h.knowledge_weights.lab}}},
        {"punctuality_thresholds",
         {{"low", h.punctuality_thresholds.low}, {"high", h.punctuality_thresholds.high}}},
        {"performance_weights",
         {{"knowledge", h.performance_weights.knowledge},
          {"punctuality", h.performance_weights.punctuality}}},
        {"overall_weights",
         {{"performance", h.overall_weights.performance}, {"coaching", h.overall_weights.coaching}}},
        {"level_encoding",
         {{"low", h.level_encoding.low},
          {"medium", h.level_encoding.medium},
          {"high", h.level_encoding.high}}},
        {"level_cutoffs", {{"medium", h.level_cutoffs.medium}, {"high", h.level_cutoffs.high}}}}},
  };
  return doc.dump(2) + "\n";
}

std::string fingerprint(const ToolkitConfig& cfg) { return fnv1a64_hex(to_json(cfg)); }

}  // namespace edm
