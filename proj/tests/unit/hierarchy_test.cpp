#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "edm/error.hpp"
#include "edm/hierarchy.hpp"

namespace {

namespace hi = edm::hierarchy;
using hi::Level;

edm::StudentRecord rec(double quiz, double others, double attendance, bool coaching = true, int year = 1) {
  return {"S", year, 2 * year - 1, quiz, others, others, others, attendance, 3.0, coaching, {}};
}

TEST(Hierarchy, DefaultQuizWeight) {
  const hi::HierarchyConfig cfg;
  EXPECT_EQ(cfg.knowledge_weights.quiz, 0.15);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Hierarchy, KnowledgeHandExamples) {
  const hi::HierarchyConfig cfg;
  EXPECT_EQ(hi::score_knowledge(rec(100, 100, 70), cfg), Level::kHigh);
  EXPECT_EQ(hi::score_knowledge(rec(0, 0, 70), cfg), Level::kLow);
  EXPECT_NEAR(hi::knowledge_score(rec(100, 50, 70), cfg), 0.575, 1e-12);
  EXPECT_EQ(hi::score_knowledge(rec(100, 50, 70), cfg), Level::kMedium);
}

TEST(Hierarchy, PunctualityThresholds) {
  const hi::HierarchyConfig cfg;
  EXPECT_EQ(hi::score_punctuality(rec(0, 0, 100), cfg), Level::kHigh);
  EXPECT_EQ(hi::score_punctuality(rec(0, 0, 0), cfg), Level::kLow);
  EXPECT_EQ(hi::score_punctuality(rec(0, 0, 70), cfg), Level::kMedium);
  EXPECT_EQ(hi::score_punctuality(rec(0, 0, 60), cfg), Level::kMedium);
  EXPECT_EQ(hi::score_punctuality(rec(0, 0, 85), cfg), Level::kMedium);
  EXPECT_EQ(hi::score_punctuality(rec(0, 0, 85.1), cfg), Level::kHigh);
}

TEST(Hierarchy, PerformanceAndOverallHandExamples) {
  const hi::HierarchyConfig cfg;
  EXPECT_EQ(hi::score_performance(Level::kHigh, Level::kHigh, cfg), Level::kHigh);
  EXPECT_EQ(hi::score_performance(Level::kLow, Level::kLow, cfg), Level::kLow);
  EXPECT_DOUBLE_EQ(hi::performance_score(Level::kHigh, Level::kLow, cfg), 0.5);
  EXPECT_EQ(hi::score_performance(Level::kHigh, Level::kLow, cfg), Level::kMedium);

  EXPECT_EQ(hi::overall_ranking(Level::kHigh, true, cfg).level, Level::kHigh);
  EXPECT_EQ(hi::overall_ranking(Level::kLow, false, cfg).level, Level::kLow);
  const auto mid = hi::overall_ranking(Level::kMedium, true, cfg);
  EXPECT_NEAR(mid.score, 0.65, 1e-12);
  EXPECT_EQ(mid.level, Level::kMedium);
}

TEST(Hierarchy, RankStudentIsConsistent) {
  const hi::HierarchyConfig cfg;
  const auto r = hi::rank_student(rec(90, 90, 95, true), cfg);
  EXPECT_EQ(r.knowledge, Level::kHigh);
  EXPECT_EQ(r.punctuality, Level::kHigh);
  EXPECT_EQ(r.performance, Level::kHigh);
  EXPECT_EQ(r.overall, Level::kHigh);
  EXPECT_DOUBLE_EQ(r.overall_score, 1.0);
  EXPECT_EQ(hi::threshold(r.overall_score, cfg), r.overall);
}

TEST(Hierarchy, ValidationRejectsBadWeights) {
  auto expect_invalid = [](const hi::HierarchyConfig& cfg) {
    try {
      cfg.validate();
      ADD_FAILURE();
    } catch (const edm::Error& e) {
      EXPECT_EQ(e.kind(), edm::ErrorKind::kInvalidConfig);
    }
  };
  hi::HierarchyConfig a;
  a.knowledge_weights.quiz = 0.2;
  expect_invalid(a);
  hi::HierarchyConfig b;
  b.overall_weights = {1.2, -0.2};
  expect_invalid(b);
  hi::HierarchyConfig c;
  c.level_cutoffs = {0.7, 0.4};
  expect_invalid(c);
  hi::HierarchyConfig d;
  d.punctuality_thresholds = {85, 60};
  expect_invalid(d);
}

TEST(HierarchyProperty, ProjectionWhenOneWeightIsOne) {
  hi::HierarchyConfig cfg;
  cfg.performance_weights = {1.0, 0.0};
  cfg.overall_weights = {1.0, 0.0};
  for (auto k : hi::kLevels) {
    for (auto p : hi::kLevels) {
      EXPECT_EQ(hi::score_performance(k, p, cfg), k);
      EXPECT_EQ(hi::overall_ranking(k, p == Level::kHigh, cfg).level, k);
    }
  }
  cfg.knowledge_weights = {1.0, 0.0, 0.0, 0.0};
  for (double q : {0.0, 39.9, 40.0, 69.9, 70.0, 100.0}) {
    EXPECT_EQ(hi::score_knowledge(rec(q, 13, 50), cfg), hi::threshold(q / 100.0, cfg));
  }
}

TEST(HierarchyProperty, RaisingOneScoreNeverLowersALevel) {
  const hi::HierarchyConfig cfg;
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> score(0, 100);
  auto at_least = [](const hi::RankingResult& hi_r, const hi::RankingResult& lo_r) {
    return hi_r.knowledge >= lo_r.knowledge && hi_r.punctuality >= lo_r.punctuality &&
           hi_r.performance >= lo_r.performance && hi_r.overall >= lo_r.overall &&
           hi_r.overall_score >= lo_r.overall_score;
  };
  for (int trial = 0; trial < 1000; ++trial) {
    edm::StudentRecord base{"S", 1, 1, score(rng), score(rng), score(rng), score(rng), score(rng), 3.0,
                            trial % 2 == 0, {}};
    auto raised = base;
    switch (trial % 6) {
      case 0: raised.quiz = std::uniform_real_distribution<double>(base.quiz, 100)(rng); break;
      case 1: raised.assignment = std::uniform_real_distribution<double>(base.assignment, 100)(rng); break;
      case 2: raised.discussion = std::uniform_real_distribution<double>(base.discussion, 100)(rng); break;
      case 3: raised.lab = std::uniform_real_distribution<double>(base.lab, 100)(rng); break;
      case 4: raised.attendance = std::uniform_real_distribution<double>(base.attendance, 100)(rng); break;
      default: raised.coaching = true; break;
    }
    EXPECT_TRUE(at_least(hi::rank_student(raised, cfg), hi::rank_student(base, cfg))) << "trial " << trial;
  }
}

TEST(CohortReport, CountsAndFractions) {
  const hi::HierarchyConfig cfg;
  const std::vector<edm::StudentRecord> rows = {
      rec(100, 100, 100, true, 1), rec(0, 0, 0, false, 1),  // high, low
      rec(100, 100, 100, true, 3), rec(100, 100, 100, true, 3)};
  const edm::Dataset ds(edm::FeatureSchema::student_default(), rows);
  const auto report = hi::cohort_report(ds, cfg);
  ASSERT_EQ(report.size(), 2U);  // years 2 and 4 are absent
  EXPECT_EQ(report[0].academic_year, 1);
  EXPECT_DOUBLE_EQ(report[0].fractions[0], 0.5);
  EXPECT_DOUBLE_EQ(report[0].fractions[2], 0.5);
  EXPECT_EQ(report[1].academic_year, 3);
  EXPECT_DOUBLE_EQ(report[1].fractions[2], 1.0);
  for (const auto& y : report) {
    EXPECT_NEAR(std::accumulate(y.fractions.begin(), y.fractions.end(), 0.0), 1.0, 1e-9);
  }
}

TEST(CohortReport, ThreeHighOneMedium) {
  const hi::HierarchyConfig cfg;
  std::vector<edm::StudentRecord> rows(3, rec(100, 100, 100, true, 2));
  // knowledge high, punctuality low -> performance medium -> 0.7 * 0.5 + 0.3 = 0.65
  rows.push_back(rec(100, 100, 0, true, 2));
  const edm::Dataset ds(edm::FeatureSchema::student_default(), rows);
  const auto report = hi::cohort_report(ds, cfg);
  ASSERT_EQ(report.size(), 1U);
  EXPECT_EQ(report[0].counts, (std::array<std::size_t, 3>{0, 1, 3}));
  EXPECT_DOUBLE_EQ(report[0].fractions[1], 0.25);
  EXPECT_DOUBLE_EQ(report[0].fractions[2], 0.75);
}

TEST(YearSummary, GpaRangeAndClusters) {
  std::vector<edm::StudentRecord> rows = {rec(1, 1, 1, true, 2), rec(1, 1, 1, true, 2), rec(1, 1, 1, true, 4)};
  rows[0].gpa = 2.97;
  rows[1].gpa = 3.02;
  rows[0].cluster_label = "C2";
  rows[1].cluster_label = "C10";
  rows[2].cluster_label = "C2";
  const edm::Dataset ds(edm::FeatureSchema::student_default(), rows);
  const auto summary = hi::year_summary(ds);
  ASSERT_EQ(summary.size(), 2U);
  EXPECT_EQ(summary[0].academic_year, 2);
  EXPECT_DOUBLE_EQ(summary[0].gpa_min, 2.97);
  EXPECT_DOUBLE_EQ(summary[0].gpa_max, 3.02);
  EXPECT_NEAR(summary[0].gpa_mean, 2.995, 1e-12);
  ASSERT_EQ(summary[0].cluster_counts.size(), 2U);
  EXPECT_EQ(summary[0].cluster_counts[0].first, "C2");
  EXPECT_EQ(summary[0].cluster_counts[1].first, "C10");
}

}  // namespace
