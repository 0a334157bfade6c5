#include "edm/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "edm/error.hpp"
#include "edm/eval.hpp"

namespace edm::hierarchy {
namespace {

constexpr double kWeightTolerance = 1e-9;

void check_weights(std::string_view name, std::initializer_list<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::kInvalidConfig, fmt::format("{} has a negative weight", name));
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightTolerance) {
    throw Error(ErrorKind::kInvalidConfig, fmt::format("{} weights sum to {}, not 1", name, sum));
  }
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kLow: return "low";
    case Level::kMedium: return "medium";
    case Level::kHigh: return "high";
  }
  return "low";
}

std::optional<Level> parse_level(std::string_view text) {
  for (auto level : kLevels) {
    if (to_string(level) == text) return level;
  }
  return std::nullopt;
}

void HierarchyConfig::validate() const {
  const auto& k = knowledge_weights;
  check_weights("knowledge", {k.quiz, k.assignment, k.discussion, k.lab});
  check_weights("performance", {performance_weights.knowledge, performance_weights.punctuality});
  check_weights("overall", {overall_weights.performance, overall_weights.coaching});
  if (!(level_cutoffs.medium < level_cutoffs.high)) {
    throw Error(ErrorKind::kInvalidConfig, "level cutoffs must be strictly increasing");
  }
  if (!(punctuality_thresholds.low < punctuality_thresholds.high)) {
    throw Error(ErrorKind::kInvalidConfig, "punctuality thresholds must be strictly increasing");
  }
  if (!(level_encoding.low <= level_encoding.medium && level_encoding.medium <= level_encoding.high)) {
    throw Error(ErrorKind::kInvalidConfig, "level encoding must be non-decreasing");
  }
}

double encode(Level level, const HierarchyConfig& cfg) {
  switch (level) {
    case Level::kLow: return cfg.level_encoding.low;
    case Level::kMedium: return cfg.level_encoding.medium;
    case Level::kHigh: return cfg.level_encoding.high;
  }
  return cfg.level_encoding.low;
}

Level threshold(double score, const HierarchyConfig& cfg) {
  if (score < cfg.level_cutoffs.medium) return Level::kLow;
  if (score < cfg.level_cutoffs.high) return Level::kMedium;
  return Level::kHigh;
}

double knowledge_score(const StudentRecord& r, const HierarchyConfig& cfg) {
  const auto& w = cfg.knowledge_weights;
  return (w.quiz * r.quiz + w.assignment * r.assignment + w.discussion * r.discussion +
          w.lab * r.lab) /
         100.0;
}

Level score_knowledge(const StudentRecord& r, const HierarchyConfig& cfg) {
  return threshold(knowledge_score(r, cfg), cfg);
}

Level score_punctuality(const StudentRecord& r, const HierarchyConfig& cfg) {
  if (r.attendance < cfg.punctuality_thresholds.low) return Level::kLow;
  if (r.attendance > cfg.punctuality_thresholds.high) return Level::kHigh;
  return Level::kMedium;
}

double performance_score(Level knowledge, Level punctuality, const HierarchyConfig& cfg) {
  return cfg.performance_weights.knowledge * encode(knowledge, cfg) +
         cfg.performance_weights.punctuality * encode(punctuality, cfg);
}

Level score_performance(Level knowledge, Level punctuality, const HierarchyConfig& cfg) {
  return threshold(performance_score(knowledge, punctuality, cfg), cfg);
}

OverallRanking overall_ranking(Level performance, bool coaching, const HierarchyConfig& cfg) {
  const double score = cfg.overall_weights.performance * encode(performance, cfg) +
                       cfg.overall_weights.coaching * encode(coaching ? Level::kHigh : Level::kLow, cfg);
  return {threshold(score, cfg), score};
}

RankingResult rank_student(const StudentRecord& r, const HierarchyConfig& cfg) {
  RankingResult out;
  out.student_id = r.student_id;
  out.knowledge = score_knowledge(r, cfg);
  out.punctuality = score_punctuality(r, cfg);
  out.performance = score_performance(out.knowledge, out.punctuality, cfg);
  const auto overall = overall_ranking(out.performance, r.coaching, cfg);
  out.overall = overall.level;
  out.overall_score = overall.score;
  return out;
}

std::vector<YearDistribution> cohort_report(const Dataset& ds, const HierarchyConfig& cfg) {
  std::map<int, YearDistribution> by_year;
  for (const auto& row : ds.rows()) {
    auto& year = by_year[row.academic_year];
    year.academic_year = row.academic_year;
    ++year.students;
    ++year.counts[static_cast<std::size_t>(rank_student(row, cfg).overall)];
  }
  std::vector<YearDistribution> out;
  for (auto& [_, year] : by_year) {
    for (std::size_t l = 0; l < 3; ++l) {
      year.fractions[l] = static_cast<double>(year.counts[l]) / static_cast<double>(year.students);
    }
    out.push_back(year);
  }
  return out;
}

std::vector<YearSummary> year_summary(const Dataset& ds) {
  struct Acc {
    YearSummary summary;
    double gpa_sum = 0.0;
    std::map<std::string, std::size_t> clusters;
  };
  std::map<int, Acc> by_year;
  for (const auto& row : ds.rows()) {
    auto [it, fresh] = by_year.try_emplace(row.academic_year);
    auto& acc = it->second;
    if (fresh) {
      acc.summary.academic_year = row.academic_year;
      acc.summary.gpa_min = std::numeric_limits<double>::infinity();
      acc.summary.gpa_max = -std::numeric_limits<double>::infinity();
    }
    ++acc.summary.students;
    acc.summary.gpa_min = std::min(acc.summary.gpa_min, row.gpa);
    acc.summary.gpa_max = std::max(acc.summary.gpa_max, row.gpa);
    acc.gpa_sum += row.gpa;
    if (row.cluster_label) ++acc.clusters[*row.cluster_label];
  }
  std::vector<YearSummary> out;
  for (auto& [_, acc] : by_year) {
    acc.summary.gpa_mean = acc.gpa_sum / static_cast<double>(acc.summary.students);
    std::vector<std::string> labels;
    for (const auto& [label, _count] : acc.clusters) labels.push_back(label);
    eval::natural_sort(labels);
    for (const auto& label : labels) acc.summary.cluster_counts.emplace_back(label, acc.clusters[label]);
    out.push_back(std::move(acc.summary));
  }
  return out;
}

}  // namespace edm::hierarchy
