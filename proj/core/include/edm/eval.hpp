#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace edm::eval {

// Rows are actual classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  // Throws kInvalidArgument unless counts is labels.size() square.
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::vector<std::uint64_t>> counts);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::vector<std::uint64_t>>& counts() const { return counts_; }
  std::uint64_t count(std::size_t actual, std::size_t predicted) const { return counts_[actual][predicted]; }
  std::size_t size() const { return labels_.size(); }
  std::uint64_t total() const { return total_; }
  std::uint64_t trace() const;
  std::vector<std::uint64_t> row_totals() const;
  std::vector<std::uint64_t> column_totals() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint64_t>> counts_;
  std::uint64_t total_ = 0;
};

struct PercentageTable {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> percents;  // column-normalized, one decimal
  std::vector<std::uint64_t> row_totals;
  std::vector<std::uint64_t> column_totals;
  std::vector<bool> zero_columns;  // columns with no predictions, left all-zero
  std::uint64_t total = 0;
};

// Throws kInvalidArgument on a length mismatch or a label outside `labels`.
ConfusionMatrix confusion(std::span<const std::string> actual, std::span<const std::string> predicted,
                          std::span<const std::string> labels);

// Expands counts back into (actual, predicted) pairs, row-major.
std::pair<std::vector<std::string>, std::vector<std::string>> materialize(const ConfusionMatrix& m);

// 100 * count / column total, rounded half-up to one decimal.
PercentageTable column_percentages(const ConfusionMatrix& m);

// Half-up rounding of 100 * numerator / denominator to tenths, in exact
// integer arithmetic. Returns tenths of a percent.
std::uint64_t percent_tenths(std::uint64_t numerator, std::uint64_t denominator);

// trace / total. Throws kEmptyMatrix when total == 0.
double accuracy(const ConfusionMatrix& m);

struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;
  friend bool operator==(const Ratio&, const Ratio&) = default;
};
Ratio accuracy_ratio(const ConfusionMatrix& m);

// Text in the layout of the published table: "Predicted" header, one row per
// actual class with "x.x %" cells and the row total, then the column totals.
void write_percentage_text(std::ostream& out, const PercentageTable& table);
void write_count_text(std::ostream& out, const ConfusionMatrix& m);

// Long format: actual,predicted,count,column_percent.
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m);

// Sorts labels so embedded numbers compare numerically ("C2" < "C10").
void natural_sort(std::vector<std::string>& labels);

}  // namespace edm::eval
