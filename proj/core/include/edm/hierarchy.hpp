#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edm/dataset.hpp"

namespace edm::hierarchy {

enum class Level { kLow = 0, kMedium = 1, kHigh = 2 };

inline constexpr std::array<Level, 3> kLevels = {Level::kLow, Level::kMedium, Level::kHigh};

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

struct KnowledgeWeights {
  double quiz = 0.15;  // weekly quizzes carry 15% of the course grade
  double assignment = 0.85 / 3.0;
  double discussion = 0.85 / 3.0;
  double lab = 0.85 / 3.0;
};

struct PerformanceWeights {
  double knowledge = 0.5;
  double punctuality = 0.5;
};

struct OverallWeights {
  double performance = 0.7;
  double coaching = 0.3;
};

struct LevelEncoding {
  double low = 0.0;
  double medium = 0.5;
  double high = 1.0;
};

// score < medium -> low; score < high -> medium; otherwise high.
struct LevelCutoffs {
  double medium = 0.4;
  double high = 0.7;
};

// Attendance < low -> low; attendance > high -> high; otherwise medium.
struct PunctualityThresholds {
  double low = 60.0;
  double high = 85.0;
};

struct HierarchyConfig {
  KnowledgeWeights knowledge_weights;
  PunctualityThresholds punctuality_thresholds;
  PerformanceWeights performance_weights;
  OverallWeights overall_weights;
  LevelEncoding level_encoding;
  LevelCutoffs level_cutoffs;

  // Throws kInvalidConfig: weights non-negative summing to 1 (1e-9), cutoffs
  // and thresholds strictly increasing, encoding non-decreasing.
  void validate() const;
};

double encode(Level level, const HierarchyConfig& cfg);
Level threshold(double score, const HierarchyConfig& cfg);

// Weighted average of the four scores scaled to [0, 1].
double knowledge_score(const StudentRecord& record, const HierarchyConfig& cfg);
Level score_knowledge(const StudentRecord& record, const HierarchyConfig& cfg);
Level score_punctuality(const StudentRecord& record, const HierarchyConfig& cfg);

double performance_score(Level knowledge, Level punctuality, const HierarchyConfig& cfg);
Level score_performance(Level knowledge, Level punctuality, const HierarchyConfig& cfg);

struct OverallRanking {
  Level level = Level::kLow;
  double score = 0.0;  // in [0, 1]
};

// Coaching "yes" encodes as high, "no" as low.
OverallRanking overall_ranking(Level performance, bool coaching, const HierarchyConfig& cfg);

struct RankingResult {
  std::string student_id;
  Level knowledge = Level::kLow;
  Level punctuality = Level::kLow;
  Level performance = Level::kLow;
  Level overall = Level::kLow;
  double overall_score = 0.0;
};

RankingResult rank_student(const StudentRecord& record, const HierarchyConfig& cfg);

struct YearDistribution {
  int academic_year = 0;
  std::size_t students = 0;
  std::array<std::size_t, 3> counts{};  // indexed by Level
  std::array<double, 3> fractions{};
};

// Per academic year present, the fraction of students at each overall level.
// Years are ascending; absent years are omitted.
std::vector<YearDistribution> cohort_report(const Dataset& ds, const HierarchyConfig& cfg);

struct YearSummary {
  int academic_year = 0;
  std::size_t students = 0;
  double gpa_min = 0.0;
  double gpa_max = 0.0;
  double gpa_mean = 0.0;
  std::vector<std::pair<std::string, std::size_t>> cluster_counts;  // naturally sorted labels
};

std::vector<YearSummary> year_summary(const Dataset& ds);

}  // namespace edm::hierarchy
