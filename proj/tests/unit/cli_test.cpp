#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "edm/eval.hpp"
#include "support/temp_dir.hpp"

namespace {

namespace fs = std::filesystem;
using testing_support::run_cli;
using testing_support::slurp;
using testing_support::spit;
using testing_support::TempDir;

TEST(Cli, ExitCodeMapping) {
  using edm::ErrorKind;
  EXPECT_EQ(edm::cli::exit_code(ErrorKind::kInvalidConfig), 2);
  EXPECT_EQ(edm::cli::exit_code(ErrorKind::kIo), 2);
  EXPECT_EQ(edm::cli::exit_code(ErrorKind::kSchemaMismatch), 2);
  EXPECT_EQ(edm::cli::exit_code(ErrorKind::kMalformedRow), 3);
  EXPECT_EQ(edm::cli::exit_code(ErrorKind::kEmptyMatrix), 3);
  EXPECT_EQ(edm::cli::exit_code(ErrorKind::kUnknownCategory), 3);
}

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"cluster", "--help"}).code, 0);
  const auto none = run_cli({});
  EXPECT_EQ(none.code, 2);
  EXPECT_EQ(none.err.rfind("edm: error kind=usage", 0), 0U) << none.err;
  EXPECT_EQ(run_cli({"clean", "--out", "x"}).code, 2);
  EXPECT_EQ(run_cli({"cluster", "--in", "a", "--out", "b", "--k", "three"}).code, 2);
}

TEST(Cli, MissingConfigIsUsageError) {
  TempDir dir;
  const auto r = run_cli({"synth", "--config", dir / "absent.json", "--out", dir / "out"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("kind=io command=synth"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, SynthIsDeterministicAndWritesManifest) {
  TempDir dir;
  ASSERT_EQ(run_cli({"synth", "--out", dir / "a"}).code, 0);
  ASSERT_EQ(run_cli({"synth", "--out", dir / "b"}).code, 0);
  EXPECT_EQ(slurp(dir.path() / "a/raw.csv"), slurp(dir.path() / "b/raw.csv"));
  EXPECT_EQ(slurp(dir.path() / "a/manifest.json"), slurp(dir.path() / "b/manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(dir.path() / "a/manifest.json"));
  EXPECT_EQ(manifest["command"], "synth");
  EXPECT_EQ(manifest["counts"]["records"], 660);
  EXPECT_EQ(manifest["seed"], 42);

  ASSERT_EQ(run_cli({"synth", "--seed", "7", "--out", dir / "c"}).code, 0);
  EXPECT_NE(slurp(dir.path() / "a/raw.csv"), slurp(dir.path() / "c/raw.csv"));
}

TEST(Cli, BundledFixtureMatchesSynthOutput) {
  TempDir dir;
  ASSERT_EQ(run_cli({"synth", "--config", testing_support::default_config_path(), "--out", dir / "s"}).code, 0);
  EXPECT_EQ(slurp(dir.path() / "s/raw.csv"), slurp(testing_support::fixture_path()));
}

TEST(Cli, CleanFixture) {
  TempDir dir;
  const auto r = run_cli({"clean", "--in", testing_support::fixture_path(), "--out", dir / "c"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("stage1_remaining 591"), std::string::npos);
  EXPECT_NE(r.out.find("clean_count 500"), std::string::npos);
  const auto report = nlohmann::json::parse(slurp(dir.path() / "c/cleaning_report.json"));
  EXPECT_EQ(report["missing_cells"], 160);

  // Cleaning the cleaned file removes nothing.
  const auto again = run_cli({"clean", "--in", dir / "c/clean.csv", "--out", dir / "c2"});
  ASSERT_EQ(again.code, 0);
  EXPECT_NE(again.out.find("stage1_removed 0\n"), std::string::npos);
  EXPECT_NE(again.out.find("stage2_removed 0\n"), std::string::npos);
  EXPECT_EQ(slurp(dir.path() / "c/clean.csv"), slurp(dir.path() / "c2/clean.csv"));
}

TEST(Cli, CleanEmptyFile) {
  TempDir dir;
  spit(dir.path() / "empty.csv", "");
  const auto r = run_cli({"clean", "--in", dir / "empty.csv", "--out", dir / "c"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("clean_count 0"), std::string::npos);
}

TEST(Cli, MalformedRowIsDataError) {
  TempDir dir;
  spit(dir.path() / "bad.csv",
       "student_id,academic_year,semester,quiz,assignment,discussion,lab,attendance,gpa,coaching\nS1,1,1\n");
  const auto r = run_cli({"clean", "--in", dir / "bad.csv", "--out", dir / "c"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("kind=malformed_row"), std::string::npos) << r.err;
}

TEST(Cli, ClusterKOneAndKTooLarge) {
  TempDir dir;
  ASSERT_EQ(run_cli({"clean", "--in", testing_support::fixture_path(), "--out", dir / "c"}).code, 0);
  const auto clean_csv = dir / "c/clean.csv";
  ASSERT_EQ(run_cli({"cluster", "--in", clean_csv, "--k", "1", "--out", dir / "k1"}).code, 0);
  const auto text = slurp(dir.path() / "k1/clustered.csv");
  EXPECT_EQ(text.find(",C2\n"), std::string::npos);
  EXPECT_NE(text.find(",C1\n"), std::string::npos);

  const auto big = run_cli({"cluster", "--in", clean_csv, "--k", "501", "--out", dir / "k"});
  EXPECT_EQ(big.code, 2);
  EXPECT_EQ(run_cli({"cluster", "--in", clean_csv, "--features", "coaching", "--out", dir / "k"}).code, 2);
}

TEST(Cli, EvaluatePerfectAndMissingLabel) {
  TempDir dir;
  spit(dir.path() / "p.csv", "student_id,cluster,predicted\nA,C1,C1\nB,C2,C2\nC,C2,C2\n");
  const auto ok = run_cli({"evaluate", "--in", dir / "p.csv", "--out", dir / "e"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("accuracy 3/3 = 1"), std::string::npos) << ok.out;
  const auto missing = run_cli({"evaluate", "--in", dir / "p.csv", "--label", "grade", "--out", dir / "e2"});
  EXPECT_EQ(missing.code, 2);
  spit(dir.path() / "empty.csv", "student_id,cluster,predicted\n");
  EXPECT_EQ(run_cli({"evaluate", "--in", dir / "empty.csv", "--out", dir / "e3"}).code, 3);
}

TEST(Cli, TrainPredictRoundTrip) {
  TempDir dir;
  ASSERT_EQ(run_cli({"clean", "--in", testing_support::fixture_path(), "--out", dir / "c"}).code, 0);
  ASSERT_EQ(run_cli({"cluster", "--in", dir / "c/clean.csv", "--out", dir / "k"}).code, 0);

  // Training on cluster labels needs the cluster column.
  EXPECT_EQ(run_cli({"train", "--in", dir / "c/clean.csv", "--out", dir / "bad"}).code, 2);

  const auto t = run_cli({"train", "--in", dir / "k/clustered.csv", "--discretize", "--out", dir / "t"});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto p = run_cli({"predict", "--in", dir / "t/test.csv", "--model", dir / "t/model.json", "--out", dir / "p"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(slurp(dir.path() / "t/predictions.csv"), slurp(dir.path() / "p/predictions.csv"));

  const auto e = run_cli({"evaluate", "--in", dir / "p/predictions.csv", "--out", dir / "e"});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto eval = nlohmann::json::parse(slurp(dir.path() / "e/evaluation.json"));
  EXPECT_EQ(eval["total"], 100);

  const auto coaching = run_cli({"train", "--in", dir / "k/clustered.csv", "--label", "coaching",
                                 "--features", "quiz,gpa", "--out", dir / "t2"});
  ASSERT_EQ(coaching.code, 0) << coaching.err;
  EXPECT_NE(slurp(dir.path() / "t2/predictions.csv").find("p_yes"), std::string::npos);
}

TEST(Cli, ReportOutputs) {
  TempDir dir;
  ASSERT_EQ(run_cli({"clean", "--in", testing_support::fixture_path(), "--out", dir / "c"}).code, 0);
  const auto r = run_cli({"report", "--in", dir / "c/clean.csv", "--out", dir / "r"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto cohort = slurp(dir.path() / "r/cohort_report.csv");
  EXPECT_EQ(cohort.substr(0, cohort.find('\n')), "academic_year,level,count,fraction");
  EXPECT_EQ(std::count(cohort.begin(), cohort.end(), '\n'), 13);  // header + 4 years x 3 levels
  for (const char* name : {"year_summary.csv", "year_clusters.csv", "rankings.csv", "report.txt", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "r" / name)) << name;
  }
}

TEST(Cli, DiscretizeSelectedFeatures) {
  TempDir dir;
  ASSERT_EQ(run_cli({"clean", "--in", testing_support::fixture_path(), "--out", dir / "c"}).code, 0);
  ASSERT_EQ(run_cli({"discretize", "--in", dir / "c/clean.csv", "--features", "gpa", "--out", dir / "d"}).code, 0);
  const auto text = slurp(dir.path() / "d/discretized.csv");
  const auto first = text.substr(text.find('\n') + 1);
  const auto row = first.substr(0, first.find('\n'));
  EXPECT_TRUE(row.find(",medium,") != std::string::npos || row.find(",high,") != std::string::npos) << row;
  EXPECT_EQ(run_cli({"discretize", "--in", dir / "c/clean.csv", "--features", "coaching", "--out", dir / "d2"}).code,
            2);
}

}  // namespace
