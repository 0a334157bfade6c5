#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "edm/dataset.hpp"
#include "edm/hierarchy.hpp"
#include "edm/kmeans.hpp"
#include "edm/nbayes.hpp"
#include "edm/synth.hpp"

namespace edm {

struct ClusterSettings {
  std::size_t k = 3;
  std::size_t max_iter = 300;
  double tol = 1e-6;
  std::size_t restarts = 10;
  bool standardize = true;
};

struct ClassifierSettings {
  nbayes::FitOptions fit;
  double train_fraction = 0.8;
  bool discretize = false;  // apply the configured bands before fitting
};

// Everything the toolkit reads from its config file. Every field has a default,
// so an empty document `{}` is a valid config.
struct ToolkitConfig {
  std::uint64_t seed = 42;
  FeatureSchema schema = FeatureSchema::student_default();
  BandMap bands;
  synth::SynthConfig synth;
  ClusterSettings cluster;
  ClassifierSettings classifier;
  hierarchy::HierarchyConfig hierarchy;

  ToolkitConfig();
};

// gpa low/medium/high at 2.5 and 3.0; attendance at 60 and 85; the four
// coursework scores at 60 and 80.
BandMap default_bands();

// JSON with // and /* */ comments; the grammar is documented in
// configs/default.json. Unknown keys are rejected. Throws kInvalidConfig.
ToolkitConfig parse_config(std::string_view text);

// Throws kIo if the file cannot be read.
ToolkitConfig load_config(const std::filesystem::path& path);

// Canonical JSON of the fully resolved config.
std::string to_json(const ToolkitConfig& cfg);

std::string fingerprint(const ToolkitConfig& cfg);

}  // namespace edm
