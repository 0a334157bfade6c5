// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "edm/csv.hpp"
#include "edm/eval.hpp"
#include "edm/hierarchy.hpp"
#include "edm/kmeans.hpp"
#include "edm/nbayes.hpp"
#include "edm/synth.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing_support::run_cli;
using testing_support::slurp;
using testing_support::TempDir;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects the reasons a criterion failed; an empty list means PASS.
struct Check {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

void must(const testing_support::RunResult& r, Check& c, const std::string& what) {
  c.expect(r.code == 0, fmt::format("{} exited {}: {}", what, r.code, r.err));
}

Check criterion_cleaning() {
  Check c;
  TempDir dir;
  const auto start = Clock::now();
  const auto r = run_cli({"clean", "--in", testing_support::fixture_path(), "--out", dir / "c"});
  const double elapsed = seconds_since(start);
  must(r, c, "clean");
  if (!c.failures.empty()) return c;
  const auto report = json::parse(slurp(dir.path() / "c/cleaning_report.json"));
  c.expect(report["input_count"] == 660, "input_count != 660");
  c.expect(report["stage1_remaining"] == 591, "stage1_remaining != 591");
  c.expect(report["clean_count"] == 500, "clean_count != 500");
  c.expect(report["missing_cells"] == 160, "missing_cells != 160");
  c.expect(elapsed < 1.0, fmt::format("runtime {:.3f} s >= 1 s", elapsed));
  c.detail = fmt::format("{}/{}/{}/{} in {:.3f} s", report["input_count"].get<int>(),
                         report["stage1_remaining"].get<int>(), report["clean_count"].get<int>(),
                         report["missing_cells"].get<int>(), elapsed);
  return c;
}

Check criterion_confusion_table() {
  Check c;
  TempDir dir;
  const std::vector<std::string> labels = {"C1", "C2", "C3"};
  const edm::eval::ConfusionMatrix recovered(labels, {{210, 1, 1}, {3, 108, 1}, {4, 6, 166}});
  const auto [actual, predicted] = edm::eval::materialize(recovered);
  std::string csv = "student_id,cluster,predicted\n";
  for (std::size_t i = 0; i < actual.size(); ++i) csv += fmt::format("T{:03d},{},{}\n", i, actual[i], predicted[i]);
  testing_support::spit(dir.path() / "pairs.csv", csv);

  const auto r = run_cli({"evaluate", "--in", dir / "pairs.csv", "--out", dir / "e"});
  must(r, c, "evaluate");
  if (!c.failures.empty()) return c;
  const auto doc = json::parse(slurp(dir.path() / "e/evaluation.json"));
  const double published[3][3] = {{96.8, 0.9, 0.6}, {1.4, 93.9, 0.6}, {1.8, 5.2, 98.8}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double got = doc["column_percent"][i][j].get<double>();
      c.expect(std::abs(got - published[i][j]) <= 0.05 + 1e-9,
               fmt::format("cell ({},{}) = {} vs {}", i, j, got, published[i][j]));
      c.expect(r.out.find(fmt::format("{:.1f} %", published[i][j])) != std::string::npos,
               fmt::format("printed table lacks {:.1f} %", published[i][j]));
    }
  }
  c.expect(doc["row_totals"] == json({212, 112, 176}), "row totals differ");
  c.expect(doc["column_totals"] == json({217, 115, 168}), "column totals differ");
  c.expect(doc["total"] == 500, "total != 500");
  c.expect(doc["accuracy_ratio"]["correct"] == 484 && doc["accuracy_ratio"]["total"] == 500,
           "accuracy ratio != 484/500");
  c.expect(r.out.find("accuracy 484/500 = 0.968") != std::string::npos, "accuracy line missing");
  c.detail = "column percentages, totals 212/112/176 | 217/115/168 | 500, accuracy 484/500";
  return c;
}

Check criterion_naive_bayes() {
  Check c;
  namespace nb = edm::nbayes;
  using edm::Cell;
  const edm::FeatureSpec x{"x", edm::FeatureKind::kCategorical, {"0", "1"}, {}, {}};
  {
    const std::vector<edm::FeatureSpec> features = {x};
    const std::vector<std::vector<Cell>> rows = {{std::string("1")}, {std::string("1")}, {std::string("0")}};
    const std::vector<std::string> labels = {"A", "A", "B"};
    const auto model = nb::fit(features, rows, labels, "y");
    const auto post = nb::posterior(model, std::vector<Cell>{std::string("1")});
    c.expect(std::abs(post[0] - 0.8182) <= 1e-4 && std::abs(post[1] - 0.1818) <= 1e-4,
             fmt::format("hand example posterior {} / {}", post[0], post[1]));
  }
  std::mt19937_64 rng(20240501);
  double worst = 0.0;
  double worst_sum = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<edm::FeatureSpec> features;
    const int n_features = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int f = 0; f < n_features; ++f) {
      features.push_back({"b" + std::to_string(f), edm::FeatureKind::kCategorical, {"0", "1"}, {}, {}});
    }
    const int n_rows = std::uniform_int_distribution<int>(1, 20)(rng);
    const int n_classes = std::uniform_int_distribution<int>(1, 3)(rng);
    auto bit = [&] { return std::string(std::uniform_int_distribution<int>(0, 1)(rng) ? "1" : "0"); };
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < n_rows; ++i) {
      std::vector<Cell> row;
      for (int f = 0; f < n_features; ++f) row.emplace_back(bit());
      rows.push_back(std::move(row));
      labels.push_back("c" + std::to_string(std::uniform_int_distribution<int>(0, n_classes - 1)(rng)));
    }
    std::vector<Cell> query;
    for (int f = 0; f < n_features; ++f) query.emplace_back(bit());

    const auto model = nb::fit(features, rows, labels, "y");
    const auto post = nb::posterior(model, query);
    const auto expected = oracle::bayes_posterior(features, rows, labels, 1.0, 1e-9, query);
    for (std::size_t k = 0; k < post.size(); ++k) {
      worst = std::max(worst, std::abs(post[k] - expected.at(model.classes()[k])));
    }
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(post.begin(), post.end(), 0.0) - 1.0));
  }
  c.expect(worst <= 1e-9, fmt::format("max oracle deviation {:.3e}", worst));
  c.expect(worst_sum <= 1e-9, fmt::format("max posterior sum deviation {:.3e}", worst_sum));
  c.detail = fmt::format("hand example ok, 200 random models max |diff| {:.1e}", worst);
  return c;
}

Check criterion_kmeans() {
  Check c;
  namespace km = edm::kmeans;
  km::Options opts;
  opts.k = 2;
  opts.restarts = 10;
  {
    const auto r = km::fit(km::PointMatrix::from_rows({{1}, {2}, {10}, {11}}), opts);
    const double lo = std::min(r.centroids(0, 0), r.centroids(1, 0));
    const double hi = std::max(r.centroids(0, 0), r.centroids(1, 0));
    c.expect(lo == 1.5 && hi == 10.5 && r.inertia == 1.0,
             fmt::format("{{1,2,10,11}} gave centroids {}, {} inertia {}", lo, hi, r.inertia));
  }
  std::mt19937_64 rng(4242);
  int optimal = 0;
  bool below = false;
  bool increasing = false;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n; ++i) {
      rows.push_back({std::uniform_real_distribution<double>(-5, 5)(rng),
                      std::uniform_real_distribution<double>(-5, 5)(rng)});
    }
    opts.seed = static_cast<std::uint64_t>(trial);
    const auto r = km::fit(km::PointMatrix::from_rows(rows), opts);
    const double best = oracle::best_two_partition(rows);
    below = below || r.inertia < best - 1e-9;
    if (r.inertia <= best + 1e-9) ++optimal;
    for (const auto& trace : r.traces) {
      for (std::size_t i = 1; i < trace.size(); ++i) increasing = increasing || trace[i] > trace[i - 1] + 1e-12;
    }
  }
  c.expect(!below, "an instance reported inertia below the exhaustive optimum");
  c.expect(optimal >= 90, fmt::format("only {} of 100 instances optimal", optimal));
  c.expect(!increasing, "an inertia trace increased");
  c.detail = fmt::format("{{1,2,10,11}} ok, {}/100 instances optimal", optimal);
  return c;
}

Check criterion_marginals() {
  Check c;
  TempDir dir;
  must(run_cli({"clean", "--in", testing_support::fixture_path(), "--out", dir / "c"}), c, "clean");
  must(run_cli({"cluster", "--in", dir / "c/clean.csv", "--k", "3", "--out", dir / "k"}), c, "cluster");
  if (!c.failures.empty()) return c;

  const auto schema = edm::FeatureSchema::student_default();
  const auto text = slurp(dir.path() / "c/clean.csv");
  const auto ds = edm::clean(edm::parse_csv(std::string_view(text), schema).records, schema).dataset;
  const edm::synth::SynthConfig defaults;
  std::size_t outside = 0;
  for (const auto& r : ds.rows()) {
    const auto& range = defaults.gpa_ranges[static_cast<std::size_t>(r.academic_year - 1)];
    if (r.gpa < range.min || r.gpa > range.max) ++outside;
  }
  c.expect(ds.size() == 500, fmt::format("{} clean rows", ds.size()));
  c.expect(outside == 0, fmt::format("{} GPA values outside their year's range", outside));

  const auto summary = json::parse(slurp(dir.path() / "k/cluster_summary.json"));
  std::size_t non_empty = 0;
  for (const auto& cl : summary["clusters"]) non_empty += cl["size"].get<std::size_t>() > 0 ? 1 : 0;
  c.expect(non_empty == 3, fmt::format("{} non-empty clusters", non_empty));
  std::string sizes;
  for (const auto& cl : summary["clusters"]) sizes += fmt::format(" {}={}", cl["label"].get<std::string>(), cl["size"].get<int>());
  c.detail = fmt::format("all 500 GPAs in range, clusters{}", sizes);
  return c;
}

Check criterion_hierarchy() {
  Check c;
  namespace hi = edm::hierarchy;
  const hi::HierarchyConfig cfg;
  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> score(0, 100);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    edm::StudentRecord base{"S", 1, 1, score(rng), score(rng), score(rng), score(rng), score(rng), 3.0,
                            std::uniform_int_distribution<int>(0, 1)(rng) == 1, {}};
    auto raised = base;
    double* fields[] = {&raised.quiz, &raised.assignment, &raised.discussion, &raised.lab, &raised.attendance};
    const int which = std::uniform_int_distribution<int>(0, 5)(rng);
    if (which == 5) {
      raised.coaching = true;
    } else {
      *fields[which] = std::uniform_real_distribution<double>(*fields[which], 100)(rng);
    }
    const auto a = hi::rank_student(base, cfg);
    const auto b = hi::rank_student(raised, cfg);
    if (b.knowledge < a.knowledge || b.punctuality < a.punctuality || b.performance < a.performance ||
        b.overall < a.overall) {
      ++violations;
    }
  }
  c.expect(violations == 0, fmt::format("{} monotonicity violations", violations));

  const auto ds = edm::clean(edm::synth::generate(edm::synth::SynthConfig{}), edm::FeatureSchema::student_default())
                      .dataset;
  double worst = 0.0;
  for (const auto& y : hi::cohort_report(ds, cfg)) {
    worst = std::max(worst, std::abs(std::accumulate(y.fractions.begin(), y.fractions.end(), 0.0) - 1.0));
  }
  c.expect(worst <= 1e-9, fmt::format("fractions deviate from 1 by {:.3e}", worst));
  c.expect(cfg.knowledge_weights.quiz == 0.15, "default quiz weight is not 0.15");
  c.detail = "1000 raised pairs monotone, per-year fractions sum to 1, quiz weight 0.15";
  return c;
}

std::map<std::string, std::string> pipeline(const fs::path& root, Check& c) {
  const auto p = [&](const std::string& rel) { return (root / rel).string(); };
  must(run_cli({"synth", "--seed", "42", "--out", p("synth")}), c, "synth");
  must(run_cli({"clean", "--in", p("synth/raw.csv"), "--out", p("clean")}), c, "clean");
  must(run_cli({"cluster", "--in", p("clean/clean.csv"), "--seed", "42", "--out", p("cluster")}), c, "cluster");
  must(run_cli({"train", "--in", p("cluster/clustered.csv"), "--seed", "42", "--out", p("train")}), c, "train");
  must(run_cli({"evaluate", "--in", p("train/predictions.csv"), "--out", p("evaluate")}), c, "evaluate");
  must(run_cli({"report", "--in", p("cluster/clustered.csv"), "--out", p("report")}), c, "report");
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = slurp(entry.path());
  }
  return files;
}

Check criterion_determinism() {
  Check c;
  TempDir dir;
  const auto start = Clock::now();
  const auto first = pipeline(dir.path() / "run1", c);
  const double elapsed = seconds_since(start);
  const auto second = pipeline(dir.path() / "run2", c);
  if (!c.failures.empty()) return c;
  c.expect(first.size() == second.size(), "runs produced different file sets");
  std::size_t identical = 0;
  for (const auto& [name, content] : first) {
    auto it = second.find(name);
    if (it == second.end() || it->second != content) {
      c.failures.push_back(fmt::format("{} differs between runs", name));
    } else {
      ++identical;
    }
  }
  c.expect(first.size() >= 20, fmt::format("only {} artifacts produced", first.size()));
  c.expect(elapsed < 10.0, fmt::format("pipeline took {:.3f} s", elapsed));
  c.detail = fmt::format("{} artifacts byte-identical, one run {:.3f} s", identical, elapsed);
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"1 cleaning counts", criterion_cleaning},
      {"2 confusion table reproduction", criterion_confusion_table},
      {"3 naive bayes oracle", criterion_naive_bayes},
      {"4 k-means optimality", criterion_kmeans},
      {"5 synthetic marginals", criterion_marginals},
      {"6 hierarchy properties", criterion_hierarchy},
      {"7 determinism", criterion_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check result;
    try {
      result = run();
    } catch (const std::exception& e) {
      result.failures.push_back(std::string("exception: ") + e.what());
    }
    if (result.failures.empty()) {
      std::cout << "PASS criterion " << name << ": " << result.detail << '\n';
    } else {
      ++failed;
      std::cout << "FAIL criterion " << name << ": ";
      for (std::size_t i = 0; i < result.failures.size(); ++i) std::cout << (i ? "; " : "") << result.failures[i];
      std::cout << '\n';
    }
  }
  return failed == 0 ? 0 : 1;
}
