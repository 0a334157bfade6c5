#include <random>

#include <benchmark/benchmark.h>

#include "edm/dataset.hpp"
#include "edm/eval.hpp"
#include "edm/hierarchy.hpp"
#include "edm/kmeans.hpp"
#include "edm/nbayes.hpp"
#include "edm/synth.hpp"

namespace {

const edm::Dataset& cohort() {
  static const edm::Dataset ds =
      edm::clean(edm::synth::generate(edm::synth::SynthConfig{}), edm::FeatureSchema::student_default()).dataset;
  return ds;
}

const std::vector<std::string> kScoreFeatures = {"quiz", "assignment", "discussion", "lab", "attendance", "gpa"};

void BM_SynthAndClean(benchmark::State& state) {
  const edm::synth::SynthConfig cfg;
  const auto schema = edm::FeatureSchema::student_default();
  for (auto _ : state) {
    auto result = edm::clean(edm::synth::generate(cfg), schema);
    benchmark::DoNotOptimize(result.report);
  }
}
BENCHMARK(BM_SynthAndClean)->Unit(benchmark::kMillisecond);

void BM_NaiveBayesFit(benchmark::State& state) {
  const auto& ds = cohort();
  for (auto _ : state) {
    auto model = edm::nbayes::fit(ds, "coaching", kScoreFeatures);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_NaiveBayesFit)->Unit(benchmark::kMicrosecond);

void BM_NaiveBayesPosterior(benchmark::State& state) {
  const auto& ds = cohort();
  const auto model = edm::nbayes::fit(ds, "coaching", kScoreFeatures);
  for (auto _ : state) {
    for (const auto& r : ds.rows()) benchmark::DoNotOptimize(edm::nbayes::posterior(model, r));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.size()));
}
BENCHMARK(BM_NaiveBayesPosterior)->Unit(benchmark::kMicrosecond);

void BM_KMeansFit(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0, 1);
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double centre = static_cast<double>(i % 3) * 5.0;
    rows[i] = {centre + noise(rng), centre + noise(rng), noise(rng), noise(rng), noise(rng), noise(rng)};
  }
  const auto data = edm::kmeans::PointMatrix::from_rows(rows);
  edm::kmeans::Options opts;
  for (auto _ : state) {
    auto result = edm::kmeans::fit(data, opts);
    benchmark::DoNotOptimize(result.inertia);
  }
}
BENCHMARK(BM_KMeansFit)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_ConfusionAndPercentages(benchmark::State& state) {
  const std::vector<std::string> labels = {"C1", "C2", "C3"};
  const edm::eval::ConfusionMatrix m(labels, {{210, 1, 1}, {3, 108, 1}, {4, 6, 166}});
  const auto [actual, predicted] = edm::eval::materialize(m);
  for (auto _ : state) {
    auto table = edm::eval::column_percentages(edm::eval::confusion(actual, predicted, labels));
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_ConfusionAndPercentages)->Unit(benchmark::kMicrosecond);

void BM_CohortReport(benchmark::State& state) {
  const auto& ds = cohort();
  const edm::hierarchy::HierarchyConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(edm::hierarchy::cohort_report(ds, cfg));
}
BENCHMARK(BM_CohortReport)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
