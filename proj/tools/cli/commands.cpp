#include "cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "cli/io.hpp"
#include "edm/config.hpp"
#include "edm/csv.hpp"
#include "edm/error.hpp"
#include "edm/eval.hpp"
#include "edm/hierarchy.hpp"
#include "edm/kmeans.hpp"
#include "edm/nbayes.hpp"
#include "edm/synth.hpp"

namespace edm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kDefaultClusterFeatures = {"quiz", "assignment", "discussion",
                                                          "lab",  "attendance", "gpa"};

struct Context {
  ToolkitConfig cfg;
  std::uint64_t seed = 0;
  fs::path out_dir;
  Manifest manifest;

  explicit Context(const std::string& command) : manifest(command) {}

  void emit(const std::string& name, const std::string& content) {
    write_file(out_dir / name, content);
    manifest.add_output(name);
  }

  std::string input(const fs::path& path) {
    auto text = read_file(path);
    manifest.add_input(path, text);
    return text;
  }

  void finish() const { manifest.write(out_dir); }
};

Context prepare(const Invocation& inv) {
  Context ctx(inv.command);
  if (!inv.config_path.empty()) {
    const auto text = ctx.input(inv.config_path);
    ctx.cfg = parse_config(text);
  }
  ctx.seed = inv.seed_set ? inv.seed : ctx.cfg.seed;
  ctx.manifest.set_seed(ctx.seed);
  ctx.manifest.set_config_fingerprint(fingerprint(ctx.cfg));

  if (inv.out.empty()) throw Error(ErrorKind::kInvalidArgument, "--out is required");
  ctx.out_dir = inv.out;
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec || !fs::is_directory(ctx.out_dir)) {
    throw Error(ErrorKind::kIo, fmt::format("cannot create output directory '{}'", inv.out));
  }
  return ctx;
}

const std::string& require_in(const Invocation& inv) {
  if (inv.in.empty()) throw Error(ErrorKind::kInvalidArgument, "--in is required");
  return inv.in;
}

LoadedDataset load_input(Context& ctx, const Invocation& inv) {
  const auto text = ctx.input(require_in(inv));
  auto loaded = load_dataset(text, ctx.cfg.schema);
  ctx.manifest.count("rows_read", loaded.report.input_count);
  ctx.manifest.count("rows_dropped", loaded.report.input_count - loaded.report.clean_count);
  return loaded;
}

std::string dataset_csv(const Dataset& ds) {
  std::ostringstream s;
  write_dataset_csv(s, ds);
  return s.str();
}

json report_json(const CleaningReport& r) {
  return {{"input_count", r.input_count},       {"stage1_removed", r.stage1_removed},
          {"stage1_remaining", r.stage1_remaining}, {"stage2_removed", r.stage2_removed},
          {"clean_count", r.clean_count},       {"missing_cells", r.missing_cells}};
}

std::string fixed(double v, int digits) { return fmt::format("{:.{}f}", v, digits); }

// Bands from the config restricted to `features` (all configured bands when empty).
BandMap selected_bands(const BandMap& bands, const std::vector<std::string>& features,
                       std::string_view exclude = {}) {
  BandMap out;
  for (const auto& [name, spec] : bands) {
    if (name == exclude) continue;
    if (!features.empty() && std::find(features.begin(), features.end(), name) == features.end()) {
      continue;
    }
    out.emplace(name, spec);
  }
  if (!features.empty()) {
    for (const auto& f : features) {
      if (!bands.contains(f) && f != exclude) {
        throw Error(ErrorKind::kInvalidBands, fmt::format("no bands configured for '{}'", f));
      }
    }
  }
  return out;
}

std::string predictions_csv(const nbayes::NaiveBayesModel& model, const Dataset& ds) {
  bool with_actual = !ds.empty();
  for (const auto& r : ds.rows()) {
    if (model.label() == columns::kCluster && !r.cluster_label) with_actual = false;
  }
  std::ostringstream s;
  s << columns::kStudentId;
  if (with_actual) s << ',' << escape_csv_field(model.label());
  s << ",predicted";
  for (const auto& c : model.classes()) s << ',' << escape_csv_field("p_" + c);
  s << '\n';
  for (const auto& r : ds.rows()) {
    const auto post = nbayes::posterior(model, r);
    s << escape_csv_field(r.student_id);
    if (with_actual) {
      const auto actual = column_value(r, model.label());
      s << ',';
      if (const auto* text = std::get_if<std::string>(&actual)) {
        s << escape_csv_field(*text);
      } else {
        s << format_number(std::get<double>(actual));
      }
    }
    s << ',' << escape_csv_field(model.classes()[nbayes::argmax(post)]);
    for (double p : post) s << ',' << format_number(p);
    s << '\n';
  }
  return s.str();
}

}  // namespace

void cmd_synth(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  auto cfg = ctx.cfg.synth;
  cfg.seed = ctx.seed;
  cfg.validate();
  const auto records = synth::generate(cfg);

  std::ostringstream s;
  const auto header = standard_header(false);
  write_raw_csv(s, records, header);
  ctx.emit("raw.csv", s.str());
  ctx.manifest.count("records", records.size());
  ctx.finish();
  out << fmt::format("synth: {} records written to {}\n", records.size(), (ctx.out_dir / "raw.csv").string());
}

void cmd_clean(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  const auto loaded = load_input(ctx, inv);
  const auto& r = loaded.report;

  ctx.emit("clean.csv", dataset_csv(loaded.dataset));
  auto doc = report_json(r);
  doc["unparseable_cells"] = loaded.unparseable_cells;
  ctx.emit("cleaning_report.json", doc.dump(2) + "\n");
  for (const auto& [key, value] : doc.items()) ctx.manifest.count(key, value.get<std::uint64_t>());
  ctx.finish();

  out << fmt::format("input {}\nstage1_removed {}\nstage1_remaining {}\nstage2_removed {}\n"
                     "clean_count {}\nmissing_cells {}\n",
                     r.input_count, r.stage1_removed, r.stage1_remaining, r.stage2_removed,
                     r.clean_count, r.missing_cells);
}

void cmd_discretize(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  const auto loaded = load_input(ctx, inv);
  const auto bands = selected_bands(ctx.cfg.bands, inv.features);
  const auto ds = discretize(loaded.dataset, bands);

  ctx.emit("discretized.csv", dataset_csv(ds));
  ctx.manifest.count("rows", ds.size());
  ctx.manifest.count("banded_features", bands.size());
  ctx.finish();
  out << fmt::format("discretize: {} rows, {} banded features\n", ds.size(), bands.size());
}

void cmd_cluster(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  const auto loaded = load_input(ctx, inv);
  const auto& features = inv.features.empty() ? kDefaultClusterFeatures : inv.features;
  const auto& settings = ctx.cfg.cluster;

  kmeans::Options opts;
  opts.k = inv.k_set ? inv.k : settings.k;
  opts.seed = ctx.seed;
  opts.max_iter = settings.max_iter;
  opts.tol = settings.tol;
  opts.restarts = settings.restarts;

  const auto points = kmeans::project(loaded.dataset, features);
  if (opts.k == 0 || opts.k > points.rows()) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("k = {} needs between 1 and {} points", opts.k, points.rows()));
  }
  kmeans::Standardization standardization{std::vector<double>(points.cols(), 0.0),
                                          std::vector<double>(points.cols(), 1.0)};
  if (settings.standardize) standardization = kmeans::fit_standardization(points);
  const auto scaled = kmeans::standardize(points, standardization);
  const auto result = kmeans::fit(scaled, opts);
  const auto centroids = kmeans::to_original_units(result.centroids, standardization);

  std::vector<StudentRecord> rows = loaded.dataset.rows();
  std::vector<std::size_t> sizes(opts.k, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].cluster_label = kmeans::cluster_name(result.assignment[i]);
    ++sizes[result.assignment[i]];
  }
  const Dataset labeled(loaded.dataset.schema(), std::move(rows));
  ctx.emit("clustered.csv", dataset_csv(labeled));

  json clusters = json::array();
  for (std::size_t c = 0; c < opts.k; ++c) {
    json centroid = json::object();
    for (std::size_t j = 0; j < features.size(); ++j) centroid[features[j]] = centroids(c, j);
    clusters.push_back({{"label", kmeans::cluster_name(c)}, {"size", sizes[c]}, {"centroid", centroid}});
  }
  json summary = {
      {"k", opts.k},
      {"features", features},
      {"standardized", settings.standardize},
      {"standardization", {{"means", standardization.means}, {"scales", standardization.scales}}},
      {"clusters", clusters},
      {"inertia", result.inertia},
      {"iterations", result.iterations},
      {"restarts", result.restarts_used},
      {"best_restart", result.best_restart},
      {"seed", result.seed},
  };
  ctx.emit("cluster_summary.json", summary.dump(2) + "\n");

  std::ostringstream text;
  text << fmt::format("k-means, k={} over {} rows ({})\n", opts.k, labeled.size(),
                      settings.standardize ? "standardized" : "raw units");
  text << fmt::format("{:<8}{:>6}", "cluster", "size");
  for (const auto& f : features) text << fmt::format("{:>12}", f);
  text << '\n';
  for (std::size_t c = 0; c < opts.k; ++c) {
    text << fmt::format("{:<8}{:>6}", kmeans::cluster_name(c), sizes[c]);
    for (std::size_t j = 0; j < features.size(); ++j) text << fmt::format("{:>12}", fixed(centroids(c, j), 3));
    text << '\n';
  }
  text << fmt::format("inertia {}\n", fixed(result.inertia, 6));
  ctx.emit("cluster_summary.txt", text.str());

  ctx.manifest.count("rows", labeled.size());
  ctx.manifest.count("k", opts.k);
  ctx.manifest.count("iterations", result.iterations);
  ctx.manifest.metric("inertia", result.inertia);
  ctx.finish();
  out << text.str();
}

void cmd_train(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  const auto loaded = load_input(ctx, inv);
  const std::string label = inv.label.empty() ? ctx.cfg.schema.label() : inv.label;
  const double fraction = inv.train_fraction_set ? inv.train_fraction : ctx.cfg.classifier.train_fraction;
  const bool banded = inv.discretize || ctx.cfg.classifier.discretize;

  if (label == columns::kCluster && !loaded.dataset.empty() && !loaded.dataset.has_cluster_labels()) {
    throw Error(ErrorKind::kSchemaMismatch, "input has no cluster column; run cluster first");
  }
  auto [train, test] = split(loaded.dataset, fraction, ctx.seed);
  const auto bands = banded ? selected_bands(ctx.cfg.bands, {}, label) : BandMap{};
  const auto model =
      nbayes::fit(discretize(train, bands), label, inv.features, ctx.cfg.classifier.fit);

  ctx.emit("model.json", nbayes::to_json(model));
  ctx.emit("train.csv", dataset_csv(train));
  ctx.emit("test.csv", dataset_csv(test));
  ctx.emit("predictions.csv", predictions_csv(model, test));

  ctx.manifest.count("train_rows", train.size());
  ctx.manifest.count("test_rows", test.size());
  ctx.manifest.count("classes", model.classes().size());
  ctx.manifest.count("features", model.features().size());
  ctx.finish();
  out << fmt::format("train: {} classes, {} features, {} train / {} test rows\n", model.classes().size(),
                     model.features().size(), train.size(), test.size());
}

void cmd_predict(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  if (inv.model.empty()) throw Error(ErrorKind::kInvalidArgument, "--model is required");
  const auto model = nbayes::from_json(ctx.input(inv.model));
  const auto loaded = load_input(ctx, inv);

  ctx.emit("predictions.csv", predictions_csv(model, loaded.dataset));
  ctx.manifest.count("rows", loaded.dataset.size());
  ctx.finish();
  out << fmt::format("predict: {} rows\n", loaded.dataset.size());
}

void cmd_evaluate(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  const auto table = parse_plain_csv(ctx.input(require_in(inv)));
  const std::string label = inv.label.empty() ? std::string(columns::kCluster) : inv.label;
  const auto actual_col = table.column(label);
  const auto predicted_col = table.column("predicted");

  std::vector<std::string> actual;
  std::vector<std::string> predicted;
  for (const auto& row : table.rows) {
    actual.push_back(row[actual_col]);
    predicted.push_back(row[predicted_col]);
  }
  std::vector<std::string> labels = inv.labels;
  if (labels.empty()) {
    std::set<std::string> seen(actual.begin(), actual.end());
    seen.insert(predicted.begin(), predicted.end());
    labels.assign(seen.begin(), seen.end());
    eval::natural_sort(labels);
  }
  const auto matrix = eval::confusion(actual, predicted, labels);
  const auto ratio = eval::accuracy_ratio(matrix);
  const auto percents = eval::column_percentages(matrix);

  std::ostringstream csv;
  eval::write_confusion_csv(csv, matrix);
  ctx.emit("confusion.csv", csv.str());

  const double acc = eval::accuracy(matrix);
  json doc = {
      {"labels", matrix.labels()},
      {"counts", matrix.counts()},
      {"column_percent", percents.percents},
      {"zero_columns", percents.zero_columns},
      {"row_totals", percents.row_totals},
      {"column_totals", percents.column_totals},
      {"total", matrix.total()},
      {"accuracy", acc},
      {"accuracy_ratio", {{"correct", ratio.numerator}, {"total", ratio.denominator}}},
  };
  ctx.emit("evaluation.json", doc.dump(2) + "\n");

  std::ostringstream text;
  eval::write_percentage_text(text, percents);
  text << '\n';
  eval::write_count_text(text, matrix);
  text << fmt::format("\naccuracy {}/{} = {}\n", ratio.numerator, ratio.denominator, format_number(acc));
  ctx.emit("evaluation.txt", text.str());

  ctx.manifest.count("total", matrix.total());
  ctx.manifest.count("correct", ratio.numerator);
  ctx.manifest.metric("accuracy", acc);
  ctx.finish();
  out << text.str();
}

void cmd_report(const Invocation& inv, std::ostream& out) {
  auto ctx = prepare(inv);
  const auto& hcfg = ctx.cfg.hierarchy;
  const auto loaded = load_input(ctx, inv);
  const auto& ds = loaded.dataset;
  const auto cohort = hierarchy::cohort_report(ds, hcfg);
  const auto years = hierarchy::year_summary(ds);

  std::ostringstream cohort_csv;
  cohort_csv << "academic_year,level,count,fraction\n";
  for (const auto& y : cohort) {
    for (auto level : hierarchy::kLevels) {
      const auto l = static_cast<std::size_t>(level);
      cohort_csv << y.academic_year << ',' << hierarchy::to_string(level) << ',' << y.counts[l] << ','
                 << format_number(y.fractions[l]) << '\n';
    }
  }
  ctx.emit("cohort_report.csv", cohort_csv.str());

  std::ostringstream year_csv;
  year_csv << "academic_year,students,gpa_min,gpa_max,gpa_mean\n";
  std::ostringstream cluster_csv;
  cluster_csv << "academic_year,cluster,count\n";
  for (const auto& y : years) {
    year_csv << y.academic_year << ',' << y.students << ',' << format_number(y.gpa_min) << ','
             << format_number(y.gpa_max) << ',' << format_number(y.gpa_mean) << '\n';
    for (const auto& [cluster, count] : y.cluster_counts) {
      cluster_csv << y.academic_year << ',' << escape_csv_field(cluster) << ',' << count << '\n';
    }
  }
  ctx.emit("year_summary.csv", year_csv.str());
  ctx.emit("year_clusters.csv", cluster_csv.str());

  std::ostringstream rankings;
  rankings << "student_id,knowledge,punctuality,performance,overall,overall_score\n";
  for (const auto& r : ds.rows()) {
    const auto rank = hierarchy::rank_student(r, hcfg);
    rankings << escape_csv_field(rank.student_id) << ',' << hierarchy::to_string(rank.knowledge) << ','
             << hierarchy::to_string(rank.punctuality) << ',' << hierarchy::to_string(rank.performance)
             << ',' << hierarchy::to_string(rank.overall) << ',' << format_number(rank.overall_score)
             << '\n';
  }
  ctx.emit("rankings.csv", rankings.str());

  std::ostringstream text;
  text << "Overall ranking by academic year\n";
  text << fmt::format("{:<6}{:>10}{:>10}{:>10}{:>10}\n", "year", "students", "low", "medium", "high");
  for (const auto& y : cohort) {
    text << fmt::format("{:<6}{:>10}{:>10}{:>10}{:>10}\n", y.academic_year, y.students, fixed(y.fractions[0], 3),
                        fixed(y.fractions[1], 3), fixed(y.fractions[2], 3));
  }
  text << "\nGPA by academic year\n";
  text << fmt::format("{:<6}{:>10}{:>10}{:>10}{:>10}  {}\n", "year", "students", "min", "max", "mean", "clusters");
  for (const auto& y : years) {
    std::string clusters;
    for (const auto& [cluster, count] : y.cluster_counts) {
      if (!clusters.empty()) clusters += ' ';
      clusters += fmt::format("{}={}", cluster, count);
    }
    text << fmt::format("{:<6}{:>10}{:>10}{:>10}{:>10}  {}\n", y.academic_year, y.students, fixed(y.gpa_min, 3),
                        fixed(y.gpa_max, 3), fixed(y.gpa_mean, 3), clusters.empty() ? "-" : clusters);
  }
  ctx.emit("report.txt", text.str());

  ctx.manifest.count("rows", ds.size());
  ctx.manifest.count("years", cohort.size());
  ctx.finish();
  out << text.str();
}

}  // namespace edm::cli
