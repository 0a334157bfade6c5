#include "cli/io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "edm/csv.hpp"
#include "edm/error.hpp"
#include "edm/fingerprint.hpp"

namespace edm::cli {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot read '{}'", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::kIo, fmt::format("failed writing '{}'", path.string()));
}

LoadedDataset load_dataset(std::string_view csv_text, const FeatureSchema& schema) {
  auto table = parse_csv(csv_text, schema);
  auto cleaned = clean(table.records, schema);
  return {std::move(cleaned.dataset), cleaned.report, table.unparseable_cells};
}

std::size_t PlainTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorKind::kSchemaMismatch, fmt::format("column '{}' is absent", name));
  }
  return static_cast<std::size_t>(it - header.begin());
}

PlainTable parse_plain_csv(std::string_view csv_text) {
  PlainTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  const std::string_view view(csv_text);
  while (pos < view.size()) {
    auto end = view.find('\n', pos);
    if (end == std::string_view::npos) end = view.size();
    auto line = view.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorKind::kMalformedRow,
                  fmt::format("line {}: expected {} fields, found {}", line_no, table.header.size(),
                              fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void Manifest::add_input(const std::filesystem::path& path, std::string_view content) {
  inputs_.emplace_back(path.filename().string(), fnv1a64_hex(content));
}

void Manifest::write(const std::filesystem::path& out_dir) const {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [name, hash] : inputs_) inputs.push_back({{"name", name}, {"fnv1a64", hash}});
  nlohmann::json doc = {
      {"command", command_},
      {"inputs", inputs},
      {"outputs", outputs_},
      {"seed", seed_ ? nlohmann::json(*seed_) : nlohmann::json(nullptr)},
      {"config_fingerprint", config_fingerprint_},
      {"counts", counts_},
      {"metrics", metrics_},
  };
  write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
}

}  // namespace edm::cli
