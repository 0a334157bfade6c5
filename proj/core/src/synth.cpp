#include "edm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "edm/csv.hpp"
#include "edm/error.hpp"

namespace edm::synth {
namespace {

// Uniform draw on the grid {k / scale} restricted to [range.min, range.max].
double grid_uniform(const Range& range, double scale, std::mt19937_64& rng) {
  const auto lo = static_cast<long long>(std::ceil(range.min * scale - 1e-6));
  const auto hi = static_cast<long long>(std::floor(range.max * scale + 1e-6));
  if (lo > hi) return range.min;
  std::uniform_int_distribution<long long> pick(lo, hi);
  const double v = static_cast<double>(pick(rng)) / scale;
  return std::clamp(v, range.min, range.max);
}

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::kInvalidConfig, msg); }

}  // namespace

void SynthConfig::validate() const {
  if (n_records == 0) fail("synth.n_records must be positive");
  if (stage1_removals + stage2_removals >= n_records) {
    fail("synth removals must leave at least one clean record");
  }
  for (std::size_t y = 0; y < gpa_ranges.size(); ++y) {
    const auto& r = gpa_ranges[y];
    if (!(r.min >= 0.0 && r.max <= 4.0 && r.min <= r.max)) {
      fail(fmt::format("synth GPA range for year {} must satisfy 0 <= min <= max <= 4", y + 1));
    }
  }
  for (const auto& r : score_tiers) {
    if (!(r.min >= 0.0 && r.max <= 100.0 && r.min <= r.max)) {
      fail("synth score tiers must satisfy 0 <= min <= max <= 100");
    }
  }
  std::set<std::string, std::less<>> seen;
  for (const auto* list : {&stage1_columns, &stage2_columns}) {
    for (const auto& c : *list) {
      const auto data = data_columns();
      if (c != columns::kStudentId && std::find(data.begin(), data.end(), c) == data.end()) {
        fail(fmt::format("synth column '{}' is not a data column", c));
      }
      if (!seen.insert(c).second) fail(fmt::format("synth column '{}' listed twice", c));
    }
  }
  if (stage1_removals > 0 && stage1_columns.empty()) fail("synth.stage1_columns is empty");
  if (stage2_removals > 0 && stage2_columns.empty()) fail("synth.stage2_columns is empty");

  const std::size_t removals = stage1_removals + stage2_removals;
  if (missing_cells < removals) {
    fail(fmt::format("{} missing cells cannot remove {} records", missing_cells, removals));
  }
  const std::size_t capacity = stage1_removals * (stage1_columns.size() + stage2_columns.size()) +
                               stage2_removals * stage2_columns.size();
  if (missing_cells > capacity) {
    fail(fmt::format("{} missing cells do not fit in the {} removed records", missing_cells, removals));
  }
}

std::vector<RawRecord> generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);

  std::vector<RawRecord> rows;
  rows.reserve(cfg.n_records);
  std::uniform_int_distribution<int> year_pick(1, 4);
  std::uniform_int_distribution<int> half_pick(0, 1);
  for (std::size_t i = 0; i < cfg.n_records; ++i) {
    const int year = year_pick(rng);
    const int semester = 2 * year - 1 + half_pick(rng);
    const auto& range = cfg.gpa_ranges[static_cast<std::size_t>(year - 1)];
    const double gpa = grid_uniform(range, 1000.0, rng);
    const double rel = range.max > range.min ? (gpa - range.min) / (range.max - range.min) : 0.5;
    const auto& tier = cfg.score_tiers[rel < 1.0 / 3.0 ? 0 : (rel < 2.0 / 3.0 ? 1 : 2)];

    RawRecord r;
    r.values.emplace(columns::kStudentId, fmt::format("S{:04d}", i + 1));
    r.values.emplace(columns::kAcademicYear, std::to_string(year));
    r.values.emplace(columns::kSemester, std::to_string(semester));
    for (auto column : {columns::kQuiz, columns::kAssignment, columns::kDiscussion, columns::kLab,
                        columns::kAttendance}) {
      r.values.emplace(column, format_number(grid_uniform(tier, 10.0, rng)));
    }
    r.values.emplace(columns::kGpa, format_number(gpa));
    std::bernoulli_distribution coached(0.25 + 0.5 * rel);
    r.values.emplace(columns::kCoaching, coached(rng) ? "yes" : "no");
    rows.push_back(std::move(r));
  }

  std::vector<std::size_t> order(cfg.n_records);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t removals = cfg.stage1_removals + cfg.stage2_removals;

  auto blank = [&](std::size_t row, const std::string& column) { rows[row].values[column] = std::nullopt; };

  // One missing cell per failing row decides which stage removes it.
  for (std::size_t b = 0; b < removals; ++b) {
    const bool stage1 = b < cfg.stage1_removals;
    const auto& pool = stage1 ? cfg.stage1_columns : cfg.stage2_columns;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    blank(order[b], pool[pick(rng)]);
  }

  // Surplus cells go to rows that are already removed, in columns that keep
  // them in the same stage.
  std::vector<std::pair<std::size_t, std::string>> slots;
  for (std::size_t b = 0; b < removals; ++b) {
    const std::size_t row = order[b];
    std::vector<std::string> eligible = cfg.stage2_columns;
    if (b < cfg.stage1_removals) {
      eligible.insert(eligible.end(), cfg.stage1_columns.begin(), cfg.stage1_columns.end());
    }
    for (const auto& column : eligible) {
      if (rows[row].get(column) != nullptr) slots.emplace_back(row, column);
    }
  }
  std::shuffle(slots.begin(), slots.end(), rng);
  for (std::size_t s = 0; s < cfg.missing_cells - removals; ++s) blank(slots[s].first, slots[s].second);

  return rows;
}

}  // namespace edm::synth
