#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace edm {

// Column names of the standard student CSV.
namespace columns {
inline constexpr std::string_view kStudentId = "student_id";
inline constexpr std::string_view kAcademicYear = "academic_year";
inline constexpr std::string_view kSemester = "semester";
inline constexpr std::string_view kQuiz = "quiz";
inline constexpr std::string_view kAssignment = "assignment";
inline constexpr std::string_view kDiscussion = "discussion";
inline constexpr std::string_view kLab = "lab";
inline constexpr std::string_view kAttendance = "attendance";
inline constexpr std::string_view kGpa = "gpa";
inline constexpr std::string_view kCoaching = "coaching";
inline constexpr std::string_view kCluster = "cluster";
}  // namespace columns

// The nine data columns every schema declares, in CSV order (student_id first,
// then these).
std::span<const std::string_view> data_columns();

// True for columns whose raw text is a number.
bool is_numeric_column(std::string_view column);

enum class FeatureKind { kCategorical, kNumeric };

struct NumericRange {
  double min = 0.0;
  double max = 0.0;

  bool contains(double v) const { return v >= min && v <= max; }
  friend bool operator==(const NumericRange&, const NumericRange&) = default;
};

// Half-open interval [lower, upper); the last band of a spec is closed at the top.
struct Band {
  std::string label;
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const Band&, const Band&) = default;
};

using BandSpec = std::vector<Band>;
using BandMap = std::map<std::string, BandSpec, std::less<>>;

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::vector<std::string> categories;  // categorical domain (band labels when banded)
  NumericRange range;                   // numeric domain of the underlying column
  BandSpec bands;                       // non-empty once a numeric column is discretized

  bool banded() const { return !bands.empty(); }
  bool has_category(std::string_view value) const;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<FeatureSpec> features, std::string label,
                std::vector<std::string> required);

  // All nine data columns over their full natural domains, label "cluster",
  // required {student_id, academic_year, gpa}.
  static FeatureSchema student_default();

  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::string& label() const { return label_; }
  const std::vector<std::string>& required() const { return required_; }

  const FeatureSpec* find(std::string_view name) const;
  const FeatureSpec& at(std::string_view name) const;
  bool is_required(std::string_view column) const;

  FeatureSchema with_feature(FeatureSpec replacement) const;

  // Stable hex digest over names, kinds, domains and bands.
  std::string fingerprint() const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  void validate() const;

  std::vector<FeatureSpec> features_;
  std::string label_;
  std::vector<std::string> required_;
};

// Digest of an arbitrary feature list; FeatureSchema::fingerprint() delegates here.
std::string fingerprint_features(std::span<const FeatureSpec> features);

struct StudentRecord {
  std::string student_id;
  int academic_year = 1;
  int semester = 1;
  double quiz = 0.0;
  double assignment = 0.0;
  double discussion = 0.0;
  double lab = 0.0;
  double attendance = 0.0;
  double gpa = 0.0;
  bool coaching = false;
  std::optional<std::string> cluster_label;

  friend bool operator==(const StudentRecord&, const StudentRecord&) = default;
};

using Cell = std::variant<double, std::string>;

// Raw column value of a record: numbers as double, coaching as "yes"/"no",
// the cluster label as text. Throws kSchemaMismatch for an absent cluster label
// or an unknown column.
Cell column_value(const StudentRecord& record, std::string_view column);

// Value of a record under a feature spec; banded features yield their band label.
Cell feature_value(const FeatureSpec& spec, const StudentRecord& record);

std::string band_label(const BandSpec& bands, double value);

// Throws kInvalidBands unless `bands` tiles `range` exactly.
void validate_bands(const BandSpec& bands, const NumericRange& range);

struct RawRecord {
  std::map<std::string, std::optional<std::string>, std::less<>> values;
  std::size_t line = 0;  // 1-based source line, 0 when synthesized

  // Absent key and nullopt both mean missing.
  const std::string* get(std::string_view column) const;
};

RawRecord to_raw(const StudentRecord& record);

struct CleaningReport {
  std::size_t input_count = 0;
  std::size_t stage1_removed = 0;
  std::size_t stage1_remaining = 0;
  std::size_t stage2_removed = 0;
  std::size_t clean_count = 0;
  std::size_t missing_cells = 0;

  friend bool operator==(const CleaningReport&, const CleaningReport&) = default;
};

class Dataset {
 public:
  Dataset() = default;
  // Throws kInvalidArgument when a row falls outside the schema's domains.
  Dataset(FeatureSchema schema, std::vector<StudentRecord> rows);

  const FeatureSchema& schema() const { return schema_; }
  const std::vector<StudentRecord>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const StudentRecord& operator[](std::size_t i) const { return rows_[i]; }

  // Schema-aware value: band label for discretized features, raw value otherwise.
  Cell value(const StudentRecord& record, std::string_view column) const;

  bool has_cluster_labels() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  FeatureSchema schema_;
  std::vector<StudentRecord> rows_;
};

struct CleanResult {
  Dataset dataset;
  CleaningReport report;
};

// Stage 1 drops rows missing a required column or holding an invalid value;
// stage 2 drops rows with any other missing cell.
CleanResult clean(std::span<const RawRecord> raws, const FeatureSchema& schema);

// Throws kInvalidBands for unknown or non-numeric features and for gaps/overlaps.
Dataset discretize(const Dataset& ds, const BandMap& bands);

// Seeded shuffle then prefix/suffix split; train gets round(n * train_fraction) rows.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction,
                                  std::uint64_t seed);

}  // namespace edm
