#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "edm/dataset.hpp"

namespace edm::synth {

struct Range {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct SynthConfig {
  std::size_t n_records = 660;
  std::size_t missing_cells = 160;
  std::size_t stage1_removals = 69;
  std::size_t stage2_removals = 91;
  // Per academic year 1..4, inclusive, in grade points.
  std::array<Range, 4> gpa_ranges = {{{2.82, 3.195}, {2.97, 3.029}, {2.97, 2.98}, {2.96, 2.985}}};
  // Score/attendance ranges for students in the lower, middle and upper third
  // of their year's GPA range.
  std::array<Range, 3> score_tiers = {{{40.0, 85.0}, {50.0, 95.0}, {55.0, 100.0}}};
  // Columns blanked to make a row fail stage 1 (required) or only stage 2.
  std::vector<std::string> stage1_columns = {"academic_year", "gpa"};
  std::vector<std::string> stage2_columns = {"semester", "quiz",       "assignment", "discussion",
                                             "lab",      "attendance", "coaching"};
  std::uint64_t seed = 42;

  // Throws kInvalidConfig, including when the missing cells cannot be placed
  // to produce exactly the requested removals.
  void validate() const;

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

// Exactly n_records rows with exactly missing_cells blank cells, arranged so
// cleaning removes stage1_removals rows in stage 1 and stage2_removals in
// stage 2. Deterministic in cfg.seed.
std::vector<RawRecord> generate(const SynthConfig& cfg);

}  // namespace edm::synth
