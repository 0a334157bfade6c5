#include "edm/eval.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

#include <fmt/format.h>

#include "edm/error.hpp"

namespace edm::eval {
namespace {

// Width in code points, so "Σ" pads like a single character.
std::size_t display_width(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  for (auto w = display_width(s); w < width; ++w) out.push_back(' ');
  return out;
}

std::string tenths_text(std::uint64_t tenths) {
  return fmt::format("{}.{}", tenths / 10, tenths % 10);
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels,
                                 std::vector<std::vector<std::uint64_t>> counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  if (counts_.size() != labels_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "confusion matrix needs one row per label");
  }
  for (const auto& row : counts_) {
    if (row.size() != labels_.size()) {
      throw Error(ErrorKind::kInvalidArgument, "confusion matrix must be square");
    }
    for (auto c : row) total_ += c;
  }
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < size(); ++i) t += counts_[i][i];
  return t;
}

std::vector<std::uint64_t> ConfusionMatrix::row_totals() const {
  std::vector<std::uint64_t> totals(size(), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) totals[i] += counts_[i][j];
  }
  return totals;
}

std::vector<std::uint64_t> ConfusionMatrix::column_totals() const {
  std::vector<std::uint64_t> totals(size(), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) totals[j] += counts_[i][j];
  }
  return totals;
}

ConfusionMatrix confusion(std::span<const std::string> actual, std::span<const std::string> predicted,
                          std::span<const std::string> labels) {
  if (actual.size() != predicted.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("{} actual labels but {} predictions", actual.size(), predicted.size()));
  }
  auto index_of = [&](const std::string& label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      throw Error(ErrorKind::kInvalidArgument, fmt::format("label '{}' is not in the label set", label));
    }
    return static_cast<std::size_t>(it - labels.begin());
  };
  std::vector<std::vector<std::uint64_t>> counts(labels.size(),
                                                 std::vector<std::uint64_t>(labels.size(), 0));
  for (std::size_t t = 0; t < actual.size(); ++t) ++counts[index_of(actual[t])][index_of(predicted[t])];
  return ConfusionMatrix(std::vector<std::string>(labels.begin(), labels.end()), std::move(counts));
}

std::pair<std::vector<std::string>, std::vector<std::string>> materialize(const ConfusionMatrix& m) {
  std::vector<std::string> actual;
  std::vector<std::string> predicted;
  actual.reserve(m.total());
  predicted.reserve(m.total());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      for (std::uint64_t c = 0; c < m.count(i, j); ++c) {
        actual.push_back(m.labels()[i]);
        predicted.push_back(m.labels()[j]);
      }
    }
  }
  return {std::move(actual), std::move(predicted)};
}

std::uint64_t percent_tenths(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) return 0;
  return (2000 * numerator + denominator) / (2 * denominator);
}

PercentageTable column_percentages(const ConfusionMatrix& m) {
  PercentageTable table;
  table.labels = m.labels();
  table.row_totals = m.row_totals();
  table.column_totals = m.column_totals();
  table.total = m.total();
  table.percents.assign(m.size(), std::vector<double>(m.size(), 0.0));
  table.zero_columns.assign(m.size(), false);
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (table.column_totals[j] == 0) {
      table.zero_columns[j] = true;
      continue;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      table.percents[i][j] =
          static_cast<double>(percent_tenths(m.count(i, j), table.column_totals[j])) / 10.0;
    }
  }
  return table;
}

Ratio accuracy_ratio(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorKind::kEmptyMatrix, "accuracy of an empty confusion matrix");
  return {m.trace(), m.total()};
}

double accuracy(const ConfusionMatrix& m) {
  const auto r = accuracy_ratio(m);
  return static_cast<double>(r.numerator) / static_cast<double>(r.denominator);
}

void write_percentage_text(std::ostream& out, const PercentageTable& table) {
  const std::size_t k = table.labels.size();
  std::size_t label_w = 2;
  for (const auto& l : table.labels) label_w = std::max(label_w, display_width(l));
  const std::size_t lead = std::string_view("Actual").size() + 2 + label_w + 2;
  std::size_t cell_w = 9;
  for (const auto& l : table.labels) cell_w = std::max(cell_w, display_width(l) + 3);

  auto cell_text = [&](std::size_t i, std::size_t j) {
    if (table.zero_columns[j]) return std::string("-");
    const auto tenths = static_cast<std::uint64_t>(table.percents[i][j] * 10.0 + 0.5);
    return tenths_text(tenths) + " %";
  };

  out << std::string(lead, ' ') << "Predicted\n";
  out << std::string(lead, ' ');
  for (std::size_t j = 0; j < k; ++j) {
    out << pad(table.labels[j] + (table.zero_columns[j] ? "*" : ""), cell_w);
  }
  out << "Σ\n";
  for (std::size_t i = 0; i < k; ++i) {
    out << pad(i == 0 ? "Actual" : "", 8) << pad(table.labels[i], label_w + 2);
    for (std::size_t j = 0; j < k; ++j) out << pad(cell_text(i, j), cell_w);
    out << table.row_totals[i] << '\n';
  }
  out << pad("Σ", lead);
  for (std::size_t j = 0; j < k; ++j) out << pad(std::to_string(table.column_totals[j]), cell_w);
  out << table.total << '\n';
  if (std::find(table.zero_columns.begin(), table.zero_columns.end(), true) != table.zero_columns.end()) {
    out << "* no predictions for this class\n";
  }
}

void write_count_text(std::ostream& out, const ConfusionMatrix& m) {
  const std::size_t k = m.size();
  std::size_t label_w = 2;
  for (const auto& l : m.labels()) label_w = std::max(label_w, display_width(l));
  std::size_t cell_w = 7;
  for (const auto& l : m.labels()) cell_w = std::max(cell_w, display_width(l) + 2);
  cell_w = std::max(cell_w, std::to_string(m.total()).size() + 2);
  const std::size_t lead = 8 + label_w + 2;

  out << std::string(lead, ' ') << "Predicted\n" << std::string(lead, ' ');
  for (const auto& l : m.labels()) out << pad(l, cell_w);
  out << "Σ\n";
  const auto rows = m.row_totals();
  for (std::size_t i = 0; i < k; ++i) {
    out << pad(i == 0 ? "Actual" : "", 8) << pad(m.labels()[i], label_w + 2);
    for (std::size_t j = 0; j < k; ++j) out << pad(std::to_string(m.count(i, j)), cell_w);
    out << rows[i] << '\n';
  }
  out << pad("Σ", lead);
  for (auto c : m.column_totals()) out << pad(std::to_string(c), cell_w);
  out << m.total() << '\n';
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m) {
  const auto table = column_percentages(m);
  out << "actual,predicted,count,column_percent\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      out << m.labels()[i] << ',' << m.labels()[j] << ',' << m.count(i, j) << ',';
      if (!table.zero_columns[j]) out << tenths_text(percent_tenths(m.count(i, j), table.column_totals[j]));
      out << '\n';
    }
  }
}

void natural_sort(std::vector<std::string>& labels) {
  auto less = [](const std::string& a, const std::string& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
      const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
      const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
      if (da && db) {
        std::size_t ie = i;
        std::size_t je = j;
        while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
        while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
        auto na = a.substr(i, ie - i);
        auto nb = b.substr(j, je - j);
        na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
        nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
        if (na.size() != nb.size()) return na.size() < nb.size();
        if (na != nb) return na < nb;
        i = ie;
        j = je;
      } else {
        if (a[i] != b[j]) return a[i] < b[j];
        ++i;
        ++j;
      }
    }
    if ((a.size() - i) != (b.size() - j)) return (a.size() - i) < (b.size() - j);
    return a < b;
  };
  std::sort(labels.begin(), labels.end(), less);
}

}  // namespace edm::eval
