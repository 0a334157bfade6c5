#include "edm/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "edm/error.hpp"

namespace edm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parses_as_number(std::string_view text) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(value);
}

bool is_missing_token(std::string_view cell) { return cell.empty() || cell == "NA"; }

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string escape_csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

RawTable parse_csv(std::string_view text, const FeatureSchema& schema) {
  RawTable table;
  std::vector<bool> keep;  // per header column
  bool have_header = false;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);  // UTF-8 BOM
    if (trim(line).empty()) continue;

    auto fields = split_csv_line(trim(line));
    if (!have_header) {
      for (auto& f : fields) f = std::string(trim(f));
      table.header = fields;
      auto has = [&](std::string_view column) {
        return std::find(fields.begin(), fields.end(), column) != fields.end();
      };
      if (!has(columns::kStudentId)) {
        throw Error(ErrorKind::kSchemaMismatch,
                    fmt::format("header is missing column '{}'", columns::kStudentId));
      }
      for (const auto& spec : schema.features()) {
        if (!has(spec.name)) {
          throw Error(ErrorKind::kSchemaMismatch,
                      fmt::format("header is missing column '{}'", spec.name));
        }
      }
      for (const auto& f : fields) {
        const bool known = f == columns::kStudentId || schema.find(f) != nullptr ||
                           f == schema.label();
        keep.push_back(known);
      }
      have_header = true;
      continue;
    }

    if (fields.size() != table.header.size()) {
      throw Error(ErrorKind::kMalformedRow,
                  fmt::format("line {}: expected {} fields, found {}", line_no,
                              table.header.size(), fields.size()));
    }
    RawRecord record;
    record.line = line_no;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!keep[i]) continue;
      const auto& column = table.header[i];
      const auto cell = trim(fields[i]);
      std::optional<std::string> value;
      if (!is_missing_token(cell)) {
        if (is_numeric_column(column) && !parses_as_number(cell)) {
          ++table.unparseable_cells;
        } else {
          value = std::string(cell);
        }
      }
      record.values.emplace(column, std::move(value));
    }
    table.records.push_back(std::move(record));
  }
  return table;
}

RawTable parse_csv(std::istream& in, const FeatureSchema& schema) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_csv(std::string_view(text), schema);
}

std::vector<std::string> standard_header(bool with_cluster) {
  std::vector<std::string> header = {std::string(columns::kStudentId)};
  for (auto column : data_columns()) header.emplace_back(column);
  if (with_cluster) header.emplace_back(columns::kCluster);
  return header;
}

void write_raw_csv(std::ostream& out, std::span<const RawRecord> records,
                   std::span<const std::string> header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << escape_csv_field(header[i]);
  }
  out << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      if (const auto* v = r.get(header[i])) out << escape_csv_field(*v);
    }
    out << '\n';
  }
}

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  const bool with_cluster = ds.has_cluster_labels();
  const auto header = standard_header(with_cluster);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : ds.rows()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      Cell v = ds.value(row, header[i]);
      if (const auto* d = std::get_if<double>(&v)) {
        out << format_number(*d);
      } else {
        out << escape_csv_field(std::get<std::string>(v));
      }
    }
    out << '\n';
  }
}

}  // namespace edm
