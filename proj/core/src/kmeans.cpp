#include "edm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "edm/error.hpp"

namespace edm::kmeans {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return sum;
}

struct RestartOutcome {
  PointMatrix centroids;
  std::vector<std::size_t> assignment;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

// Generator state for one restart depends only on (seed, restart index).
std::mt19937_64 restart_generator(std::uint64_t seed, std::size_t restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

PointMatrix initial_centroids(const PointMatrix& data, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> pool(data.rows());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::vector<double> values;
  values.reserve(k * data.cols());
  for (std::size_t c = 0; c < k; ++c) {
    std::uniform_int_distribution<std::size_t> pick(c, pool.size() - 1);
    std::swap(pool[c], pool[pick(rng)]);
    const auto row = data.row(pool[c]);
    values.insert(values.end(), row.begin(), row.end());
  }
  return PointMatrix(k, data.cols(), std::move(values), data.feature_names());
}

// Moves, for each empty cluster, the point farthest from its centroid (taken
// from a cluster that keeps at least one member) into it as a singleton.
void repair_empty_clusters(const PointMatrix& data, PointMatrix& centroids,
                           std::vector<std::size_t>& assignment) {
  const std::size_t k = centroids.rows();
  std::vector<std::size_t> sizes(k, 0);
  for (auto a : assignment) ++sizes[a];
  for (std::size_t e = 0; e < k; ++e) {
    if (sizes[e] != 0) continue;
    std::size_t farthest = data.rows();
    double best = -1.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      if (sizes[assignment[i]] < 2) continue;
      const double d = squared_distance(data.row(i), centroids.row(assignment[i]));
      if (d > best) {
        best = d;
        farthest = i;
      }
    }
    --sizes[assignment[farthest]];
    assignment[farthest] = e;
    sizes[e] = 1;
    std::ranges::copy(data.row(farthest), centroids.row(e).begin());
  }
}

PointMatrix cluster_means(const PointMatrix& data, const std::vector<std::size_t>& assignment,
                          std::size_t k) {
  const std::size_t d = data.cols();
  std::vector<double> sums(k * d, 0.0);
  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) sums[assignment[i] * d + j] += row[j];
    counts[assignment[i]] += 1.0;
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) sums[c * d + j] /= counts[c];
  }
  return PointMatrix(k, d, std::move(sums), data.feature_names());
}

RestartOutcome run_restart(const PointMatrix& data, const Options& options, std::size_t restart) {
  auto rng = restart_generator(options.seed, restart);
  RestartOutcome out;
  out.centroids = initial_centroids(data, options.k, rng);
  out.assignment.assign(data.rows(), options.k);

  for (std::size_t iter = 1; iter <= std::max<std::size_t>(options.max_iter, 1); ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto a = assign(out.centroids, data.row(i));
      changed = changed || a != out.assignment[i];
      out.assignment[i] = a;
    }
    repair_empty_clusters(data, out.centroids, out.assignment);

    PointMatrix updated = cluster_means(data, out.assignment, options.k);
    double shift = 0.0;
    for (std::size_t c = 0; c < options.k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(updated.row(c), out.centroids.row(c))));
    }
    out.centroids = std::move(updated);
    out.trace.push_back(inertia(data, out.centroids, out.assignment));
    out.iterations = iter;
    if (!changed || shift <= options.tol) break;
  }

  // Leave every point on a nearest centroid, even when stopped by tol/max_iter.
  for (std::size_t i = 0; i < data.rows(); ++i) out.assignment[i] = assign(out.centroids, data.row(i));
  repair_empty_clusters(data, out.centroids, out.assignment);
  out.inertia = inertia(data, out.centroids, out.assignment);
  return out;
}

}  // namespace

PointMatrix::PointMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                         std::vector<std::string> feature_names)
    : rows_(rows), cols_(cols), values_(std::move(values)), names_(std::move(feature_names)) {
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("{} values do not fill a {}x{} matrix", values_.size(), rows_, cols_));
  }
  if (!names_.empty() && names_.size() != cols_) {
    throw Error(ErrorKind::kInvalidArgument, "one feature name per column required");
  }
}

PointMatrix PointMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                   std::vector<std::string> feature_names) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(ErrorKind::kInvalidArgument, "ragged point rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return PointMatrix(rows.size(), cols, std::move(values), std::move(feature_names));
}

Result fit(const PointMatrix& data, const Options& options) {
  if (data.rows() == 0 || data.cols() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "k-means needs at least one point and one column");
  }
  if (options.k == 0) throw Error(ErrorKind::kInvalidArgument, "k must be at least 1");
  if (options.k > data.rows()) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("k = {} exceeds the number of points ({})", options.k, data.rows()));
  }
  if (options.restarts == 0) throw Error(ErrorKind::kInvalidArgument, "restarts must be at least 1");
  if (!(options.tol >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "tol must be >= 0");
  for (double v : data.values()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "points must be finite");
  }

  Result result;
  result.seed = options.seed;
  result.restarts_used = options.restarts;
  result.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < options.restarts; ++r) {
    auto outcome = run_restart(data, options, r);
    result.traces.push_back(outcome.trace);
    if (outcome.inertia < result.inertia) {  // ties keep the earlier restart
      result.inertia = outcome.inertia;
      result.centroids = std::move(outcome.centroids);
      result.assignment = std::move(outcome.assignment);
      result.iterations = outcome.iterations;
      result.best_restart = r;
    }
  }
  return result;
}

std::size_t assign(const PointMatrix& centroids, std::span<const double> point) {
  if (point.size() != centroids.cols()) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("point has {} coordinates, centroids have {}", point.size(), centroids.cols()));
  }
  if (centroids.rows() == 0) throw Error(ErrorKind::kInvalidArgument, "no centroids");
  std::size_t best = 0;
  double best_d = squared_distance(centroids.row(0), point);
  for (std::size_t c = 1; c < centroids.rows(); ++c) {
    const double d = squared_distance(centroids.row(c), point);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double inertia(const PointMatrix& data, const PointMatrix& centroids,
               std::span<const std::size_t> assignment) {
  if (assignment.size() != data.rows()) {
    throw Error(ErrorKind::kInvalidArgument, "assignment length differs from point count");
  }
  if (centroids.cols() != data.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "centroid dimension differs from data");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (assignment[i] >= centroids.rows()) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("assignment {} of point {} is out of range", assignment[i], i));
    }
    total += squared_distance(data.row(i), centroids.row(assignment[i]));
  }
  return total;
}

Standardization fit_standardization(const PointMatrix& data) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  Standardization s{std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) s.means[j] += data(i, j);
  }
  for (auto& m : s.means) m /= static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (data(i, j) - s.means[j]) * (data(i, j) - s.means[j]);
    const double sd = std::sqrt(sq / static_cast<double>(n));
    s.scales[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

PointMatrix standardize(const PointMatrix& data, const Standardization& s) {
  std::vector<double> values(data.values());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      values[i * data.cols() + j] = (values[i * data.cols() + j] - s.means[j]) / s.scales[j];
    }
  }
  return PointMatrix(data.rows(), data.cols(), std::move(values), data.feature_names());
}

PointMatrix to_original_units(const PointMatrix& standardized, const Standardization& s) {
  std::vector<double> values(standardized.values());
  for (std::size_t i = 0; i < standardized.rows(); ++i) {
    for (std::size_t j = 0; j < standardized.cols(); ++j) {
      auto& v = values[i * standardized.cols() + j];
      v = v * s.scales[j] + s.means[j];
    }
  }
  return PointMatrix(standardized.rows(), standardized.cols(), std::move(values),
                     standardized.feature_names());
}

PointMatrix project(const Dataset& ds, std::span<const std::string> features) {
  if (features.empty()) throw Error(ErrorKind::kInvalidArgument, "no features selected");
  for (const auto& f : features) {
    if (!is_numeric_column(f)) {
      throw Error(ErrorKind::kSchemaMismatch, fmt::format("'{}' is not a numeric column", f));
    }
  }
  std::vector<double> values;
  values.reserve(ds.size() * features.size());
  for (const auto& row : ds.rows()) {
    for (const auto& f : features) values.push_back(std::get<double>(column_value(row, f)));
  }
  return PointMatrix(ds.size(), features.size(), std::move(values),
                     std::vector<std::string>(features.begin(), features.end()));
}

std::string cluster_name(std::size_t index) { return fmt::format("C{}", index + 1); }

}  // namespace edm::kmeans
