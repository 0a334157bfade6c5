#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edm/dataset.hpp"

namespace edm {

struct RawTable {
  std::vector<std::string> header;
  std::vector<RawRecord> records;
  std::size_t unparseable_cells = 0;  // numeric cells that failed to parse
};

// Parses comma-separated text with a header row. Empty cells and "NA" are
// missing; so are numeric cells that fail to parse. Only student_id, schema
// features and the schema label are kept. Empty input yields an empty table.
//
// Throws kSchemaMismatch if the header lacks student_id or a schema feature,
// kMalformedRow (with the line number) on a field-count mismatch.
RawTable parse_csv(std::string_view text, const FeatureSchema& schema);
RawTable parse_csv(std::istream& in, const FeatureSchema& schema);

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);

std::string escape_csv_field(std::string_view field);

// Shortest text that round-trips to the same double.
std::string format_number(double value);

// Standard header: student_id then the nine data columns (+ cluster when asked).
std::vector<std::string> standard_header(bool with_cluster);

void write_raw_csv(std::ostream& out, std::span<const RawRecord> records,
                   std::span<const std::string> header);

// Writes rows in schema view: banded columns are written as band labels. The
// cluster column is emitted when every row carries a label.
void write_dataset_csv(std::ostream& out, const Dataset& ds);

}  // namespace edm
