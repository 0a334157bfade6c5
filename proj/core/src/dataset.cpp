#include "edm/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "edm/csv.hpp"
#include "edm/error.hpp"
#include "edm/fingerprint.hpp"

namespace edm {
namespace {

constexpr std::array<std::string_view, 9> kDataColumns = {
    columns::kAcademicYear, columns::kSemester,   columns::kQuiz,
    columns::kAssignment,   columns::kDiscussion, columns::kLab,
    columns::kAttendance,   columns::kGpa,        columns::kCoaching,
};

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<bool> parse_flag(std::string_view text) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "yes") return true;
  if (lowered == "no") return false;
  return std::nullopt;
}

bool is_integral(double v) { return std::floor(v) == v; }

double& numeric_field(StudentRecord& r, std::string_view column) {
  if (column == columns::kQuiz) return r.quiz;
  if (column == columns::kAssignment) return r.assignment;
  if (column == columns::kDiscussion) return r.discussion;
  if (column == columns::kLab) return r.lab;
  if (column == columns::kAttendance) return r.attendance;
  if (column == columns::kGpa) return r.gpa;
  throw Error(ErrorKind::kSchemaMismatch, fmt::format("'{}' is not a score column", column));
}

// Hard bounds of StudentRecord, independent of any schema.
NumericRange natural_range(std::string_view column) {
  if (column == columns::kAcademicYear) return {1, 4};
  if (column == columns::kSemester) return {1, 8};
  if (column == columns::kGpa) return {0, 4};
  return {0, 100};
}

// Returns a reason when `record` violates the record invariants or the schema.
std::optional<std::string> check_record(const StudentRecord& r, const FeatureSchema& schema) {
  if (r.student_id.empty()) return "empty student_id";
  if (r.academic_year < 1 || r.academic_year > 4) return "academic_year outside 1..4";
  if (r.semester < 1 || r.semester > 8) return "semester outside 1..8";
  if (r.semester != 2 * r.academic_year - 1 && r.semester != 2 * r.academic_year) {
    return "semester inconsistent with academic_year";
  }
  for (const auto& spec : schema.features()) {
    if (spec.name == columns::kCoaching) {
      if (!spec.has_category(r.coaching ? "yes" : "no")) return "coaching outside domain";
      continue;
    }
    const double v = std::get<double>(column_value(r, spec.name));
    if (!natural_range(spec.name).contains(v) || !spec.range.contains(v)) {
      return fmt::format("{} outside domain", spec.name);
    }
  }
  return std::nullopt;
}

FeatureSpec numeric_spec(std::string_view name) {
  FeatureSpec spec;
  spec.name = std::string(name);
  spec.kind = FeatureKind::kNumeric;
  spec.range = natural_range(name);
  return spec;
}

}  // namespace

std::span<const std::string_view> data_columns() { return kDataColumns; }

bool is_numeric_column(std::string_view column) {
  return column != columns::kCoaching &&
         std::find(kDataColumns.begin(), kDataColumns.end(), column) != kDataColumns.end();
}

bool FeatureSpec::has_category(std::string_view value) const {
  return std::find(categories.begin(), categories.end(), value) != categories.end();
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features, std::string label,
                             std::vector<std::string> required)
    : features_(std::move(features)), label_(std::move(label)), required_(std::move(required)) {
  validate();
}

FeatureSchema FeatureSchema::student_default() {
  std::vector<FeatureSpec> features;
  for (auto column : kDataColumns) {
    if (column == columns::kCoaching) {
      FeatureSpec spec;
      spec.name = std::string(column);
      spec.kind = FeatureKind::kCategorical;
      spec.categories = {"yes", "no"};
      features.push_back(std::move(spec));
    } else {
      features.push_back(numeric_spec(column));
    }
  }
  return FeatureSchema(std::move(features), std::string(columns::kCluster),
                       {std::string(columns::kStudentId), std::string(columns::kAcademicYear),
                        std::string(columns::kGpa)});
}

void FeatureSchema::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kInvalidConfig, msg); };

  std::set<std::string, std::less<>> seen;
  for (const auto& spec : features_) {
    if (!seen.insert(spec.name).second) fail(fmt::format("duplicate feature '{}'", spec.name));
    if (std::find(kDataColumns.begin(), kDataColumns.end(), spec.name) == kDataColumns.end()) {
      fail(fmt::format("unknown feature column '{}'", spec.name));
    }
    if (spec.name == columns::kCoaching) {
      if (spec.kind != FeatureKind::kCategorical || spec.banded()) {
        fail("coaching must be categorical");
      }
      if (spec.categories.empty()) fail("coaching domain is empty");
      for (const auto& c : spec.categories) {
        if (c != "yes" && c != "no") fail(fmt::format("coaching category '{}' is not yes/no", c));
      }
      continue;
    }
    if (!(spec.range.min <= spec.range.max)) {
      fail(fmt::format("feature '{}' has min > max", spec.name));
    }
    if (spec.kind == FeatureKind::kCategorical) {
      if (!spec.banded()) fail(fmt::format("numeric column '{}' declared categorical without bands", spec.name));
      try {
        validate_bands(spec.bands, spec.range);
      } catch (const Error& e) {
        fail(fmt::format("feature '{}': {}", spec.name, e.what()));
      }
      std::vector<std::string> labels;
      for (const auto& b : spec.bands) labels.push_back(b.label);
      if (labels != spec.categories) fail(fmt::format("feature '{}': categories differ from band labels", spec.name));
    }
  }
  for (auto column : kDataColumns) {
    if (!seen.contains(column)) fail(fmt::format("schema is missing column '{}'", column));
  }
  if (label_.empty()) fail("label is empty");
  if (label_ != columns::kCluster && !seen.contains(label_)) {
    fail(fmt::format("label '{}' is neither a feature nor '{}'", label_, columns::kCluster));
  }
  for (const auto& r : required_) {
    if (r != columns::kStudentId && r != label_ && !seen.contains(r)) {
      fail(fmt::format("required column '{}' is not in the schema", r));
    }
  }
}

const FeatureSpec* FeatureSchema::find(std::string_view name) const {
  auto it = std::find_if(features_.begin(), features_.end(),
                         [&](const FeatureSpec& f) { return f.name == name; });
  return it == features_.end() ? nullptr : &*it;
}

const FeatureSpec& FeatureSchema::at(std::string_view name) const {
  if (const auto* spec = find(name)) return *spec;
  throw Error(ErrorKind::kSchemaMismatch, fmt::format("no feature named '{}'", name));
}

bool FeatureSchema::is_required(std::string_view column) const {
  return std::find(required_.begin(), required_.end(), column) != required_.end();
}

FeatureSchema FeatureSchema::with_feature(FeatureSpec replacement) const {
  auto features = features_;
  for (auto& f : features) {
    if (f.name == replacement.name) f = replacement;
  }
  return FeatureSchema(std::move(features), label_, required_);
}

std::string FeatureSchema::fingerprint() const { return fingerprint_features(features_); }

std::string fingerprint_features(std::span<const FeatureSpec> features) {
  std::string canonical;
  for (const auto& f : features) {
    canonical += f.name;
    canonical += f.kind == FeatureKind::kNumeric ? "|num|" : "|cat|";
    for (const auto& c : f.categories) canonical += c + ",";
    canonical += "|" + format_number(f.range.min) + "," + format_number(f.range.max) + "|";
    for (const auto& b : f.bands) {
      canonical += b.label + ":" + format_number(b.lower) + ":" + format_number(b.upper) + ";";
    }
    canonical += "\n";
  }
  return fnv1a64_hex(canonical);
}

Cell column_value(const StudentRecord& r, std::string_view column) {
  if (column == columns::kAcademicYear) return static_cast<double>(r.academic_year);
  if (column == columns::kSemester) return static_cast<double>(r.semester);
  if (column == columns::kQuiz) return r.quiz;
  if (column == columns::kAssignment) return r.assignment;
  if (column == columns::kDiscussion) return r.discussion;
  if (column == columns::kLab) return r.lab;
  if (column == columns::kAttendance) return r.attendance;
  if (column == columns::kGpa) return r.gpa;
  if (column == columns::kCoaching) return std::string(r.coaching ? "yes" : "no");
  if (column == columns::kStudentId) return r.student_id;
  if (column == columns::kCluster) {
    if (!r.cluster_label) {
      throw Error(ErrorKind::kSchemaMismatch,
                  fmt::format("record '{}' has no cluster label", r.student_id));
    }
    return *r.cluster_label;
  }
  throw Error(ErrorKind::kSchemaMismatch, fmt::format("unknown column '{}'", column));
}

Cell feature_value(const FeatureSpec& spec, const StudentRecord& record) {
  Cell raw = column_value(record, spec.name);
  if (spec.banded()) return band_label(spec.bands, std::get<double>(raw));
  return raw;
}

std::string band_label(const BandSpec& bands, double value) {
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& b = bands[i];
    const bool last = i + 1 == bands.size();
    if (value >= b.lower && (value < b.upper || (last && value == b.upper))) return b.label;
  }
  throw Error(ErrorKind::kInvalidArgument,
              fmt::format("value {} lies outside every band", format_number(value)));
}

void validate_bands(const BandSpec& bands, const NumericRange& range) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::kInvalidBands, msg); };
  if (bands.empty()) fail("band list is empty");
  std::set<std::string, std::less<>> labels;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto& b = bands[i];
    if (b.label.empty()) fail("band with empty label");
    if (!labels.insert(b.label).second) fail(fmt::format("duplicate band label '{}'", b.label));
    if (!(b.lower < b.upper)) fail(fmt::format("band '{}' has lower >= upper", b.label));
    if (i + 1 < bands.size()) {
      const double next = bands[i + 1].lower;
      if (b.upper < next) fail(fmt::format("gap between bands '{}' and '{}'", b.label, bands[i + 1].label));
      if (b.upper > next) fail(fmt::format("bands '{}' and '{}' overlap", b.label, bands[i + 1].label));
    }
  }
  if (bands.front().lower != range.min) {
    fail(fmt::format("first band starts at {} but range starts at {}",
                     format_number(bands.front().lower), format_number(range.min)));
  }
  if (bands.back().upper != range.max) {
    fail(fmt::format("last band ends at {} but range ends at {}",
                     format_number(bands.back().upper), format_number(range.max)));
  }
}

const std::string* RawRecord::get(std::string_view column) const {
  auto it = values.find(column);
  if (it == values.end() || !it->second) return nullptr;
  return &*it->second;
}

RawRecord to_raw(const StudentRecord& r) {
  RawRecord raw;
  raw.values.emplace(columns::kStudentId, r.student_id);
  for (auto column : kDataColumns) {
    Cell v = column_value(r, column);
    if (const auto* d = std::get_if<double>(&v)) {
      raw.values.emplace(column, format_number(*d));
    } else {
      raw.values.emplace(column, std::get<std::string>(v));
    }
  }
  if (r.cluster_label) raw.values.emplace(columns::kCluster, *r.cluster_label);
  return raw;
}

Dataset::Dataset(FeatureSchema schema, std::vector<StudentRecord> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  for (const auto& r : rows_) {
    if (auto reason = check_record(r, schema_)) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("record '{}' violates schema: {}", r.student_id, *reason));
    }
  }
}

Cell Dataset::value(const StudentRecord& record, std::string_view column) const {
  if (const auto* spec = schema_.find(column)) return feature_value(*spec, record);
  return column_value(record, column);
}

bool Dataset::has_cluster_labels() const {
  return !rows_.empty() && std::all_of(rows_.begin(), rows_.end(), [](const StudentRecord& r) {
    return r.cluster_label.has_value();
  });
}

CleanResult clean(std::span<const RawRecord> raws, const FeatureSchema& schema) {
  CleaningReport report;
  report.input_count = raws.size();
  std::vector<StudentRecord> kept;
  kept.reserve(raws.size());

  const bool label_is_extra = schema.find(schema.label()) == nullptr;

  for (const auto& raw : raws) {
    std::vector<std::string_view> considered = {columns::kStudentId};
    considered.insert(considered.end(), kDataColumns.begin(), kDataColumns.end());
    if (label_is_extra && raw.values.contains(schema.label())) considered.push_back(schema.label());

    std::size_t missing = 0;
    bool required_missing = false;
    for (auto column : considered) {
      if (raw.get(column) == nullptr) {
        ++missing;
        if (schema.is_required(column)) required_missing = true;
      }
    }
    report.missing_cells += missing;

    // Stage 1: required columns present and every present value valid.
    StudentRecord rec;
    bool invalid = required_missing;
    if (const auto* id = raw.get(columns::kStudentId)) rec.student_id = *id;
    for (auto column : kDataColumns) {
      if (invalid) break;
      const auto* text = raw.get(column);
      if (text == nullptr) continue;
      const auto& spec = schema.at(column);
      if (column == columns::kCoaching) {
        auto flag = parse_flag(*text);
        if (!flag || !spec.has_category(*flag ? "yes" : "no")) {
          invalid = true;
        } else {
          rec.coaching = *flag;
        }
        continue;
      }
      auto number = parse_number(*text);
      if (!number || !spec.range.contains(*number) || !natural_range(column).contains(*number)) {
        invalid = true;
        continue;
      }
      if (column == columns::kAcademicYear || column == columns::kSemester) {
        if (!is_integral(*number)) {
          invalid = true;
          continue;
        }
        (column == columns::kAcademicYear ? rec.academic_year : rec.semester) =
            static_cast<int>(*number);
      } else {
        numeric_field(rec, column) = *number;
      }
    }
    if (!invalid && raw.get(columns::kAcademicYear) && raw.get(columns::kSemester) &&
        rec.semester != 2 * rec.academic_year - 1 && rec.semester != 2 * rec.academic_year) {
      invalid = true;
    }
    if (invalid) {
      ++report.stage1_removed;
      continue;
    }

    // Stage 2: anything still missing.
    if (missing > 0) {
      ++report.stage2_removed;
      continue;
    }
    if (label_is_extra) {
      if (const auto* label = raw.get(schema.label())) rec.cluster_label = *label;
    }
    kept.push_back(std::move(rec));
  }

  report.stage1_remaining = report.input_count - report.stage1_removed;
  report.clean_count = kept.size();
  return {Dataset(schema, std::move(kept)), report};
}

Dataset discretize(const Dataset& ds, const BandMap& bands) {
  FeatureSchema schema = ds.schema();
  for (const auto& [name, spec] : bands) {
    const auto* feature = schema.find(name);
    if (feature == nullptr) {
      throw Error(ErrorKind::kInvalidBands, fmt::format("bands given for unknown feature '{}'", name));
    }
    if (feature->kind != FeatureKind::kNumeric) {
      throw Error(ErrorKind::kInvalidBands, fmt::format("feature '{}' is not numeric", name));
    }
    validate_bands(spec, feature->range);
    FeatureSpec banded = *feature;
    banded.kind = FeatureKind::kCategorical;
    banded.bands = spec;
    banded.categories.clear();
    for (const auto& b : spec) banded.categories.push_back(b.label);
    schema = schema.with_feature(std::move(banded));
  }
  return Dataset(std::move(schema), ds.rows());
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("train fraction {} is outside (0, 1)", train_fraction));
  }
  if (ds.empty()) throw Error(ErrorKind::kInsufficientData, "cannot split an empty dataset");

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(ds.size()) * train_fraction));
  std::vector<StudentRecord> train;
  std::vector<StudentRecord> test;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? train : test).push_back(ds[order[i]]);
  }
  return {Dataset(ds.schema(), std::move(train)), Dataset(ds.schema(), std::move(test))};
}

}  // namespace edm
