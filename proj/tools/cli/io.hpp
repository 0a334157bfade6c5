#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edm/dataset.hpp"

namespace edm::cli {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Parses and cleans a student CSV. Rows that fail cleaning are dropped and
// reported, never fatal.
struct LoadedDataset {
  Dataset dataset;
  CleaningReport report;
  std::size_t unparseable_cells = 0;
};
LoadedDataset load_dataset(std::string_view csv_text, const FeatureSchema& schema);

// Header-keyed table for files outside the student schema (predictions).
struct PlainTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of `column`; throws kSchemaMismatch if absent.
  std::size_t column(std::string_view name) const;
};
PlainTable parse_plain_csv(std::string_view csv_text);

// One manifest.json per command run. Inputs are recorded by file name and
// content hash so identical runs in different directories match byte for byte.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void add_input(const std::filesystem::path& path, std::string_view content);
  void add_output(std::string name) { outputs_.push_back(std::move(name)); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_config_fingerprint(std::string fp) { config_fingerprint_ = std::move(fp); }
  void count(const std::string& key, std::uint64_t value) { counts_[key] = value; }
  void metric(const std::string& key, double value) { metrics_[key] = value; }

  void write(const std::filesystem::path& out_dir) const;

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  std::optional<std::uint64_t> seed_;
  std::string config_fingerprint_;
  std::map<std::string, std::uint64_t> counts_;
  std::map<std::string, double> metrics_;
};

}  // namespace edm::cli
