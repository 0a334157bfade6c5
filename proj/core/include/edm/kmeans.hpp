#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edm/dataset.hpp"

namespace edm::kmeans {

// Dense row-major n x d matrix with named columns.
class PointMatrix {
 public:
  PointMatrix() = default;
  // Throws kInvalidArgument if values.size() != rows * cols or names mismatch.
  PointMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
              std::vector<std::string> feature_names = {});

  static PointMatrix from_rows(const std::vector<std::vector<double>>& rows,
                               std::vector<std::string> feature_names = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& feature_names() const { return names_; }

  friend bool operator==(const PointMatrix&, const PointMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

struct Options {
  std::size_t k = 3;
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
  double tol = 1e-6;  // on the largest centroid displacement
  std::size_t restarts = 10;
};

struct Result {
  PointMatrix centroids;               // k x d
  std::vector<std::size_t> assignment;  // per point, in [0, k)
  double inertia = 0.0;
  std::size_t iterations = 0;     // of the selected restart
  std::size_t restarts_used = 0;
  std::size_t best_restart = 0;
  std::uint64_t seed = 0;
  // Inertia after each Lloyd iteration, one trace per restart.
  std::vector<std::vector<double>> traces;
};

// Lloyd's algorithm, best of `restarts` seeded initializations (k distinct data
// points each). Throws kInvalidArgument unless 1 <= k <= n and restarts >= 1.
Result fit(const PointMatrix& data, const Options& options);

// Nearest centroid by Euclidean distance; ties go to the lowest index.
std::size_t assign(const PointMatrix& centroids, std::span<const double> point);

double inertia(const PointMatrix& data, const PointMatrix& centroids,
               std::span<const std::size_t> assignment);

struct Standardization {
  std::vector<double> means;
  std::vector<double> scales;  // population standard deviation, 1 for constant columns
};

Standardization fit_standardization(const PointMatrix& data);
PointMatrix standardize(const PointMatrix& data, const Standardization& s);
PointMatrix to_original_units(const PointMatrix& standardized, const Standardization& s);

// Numeric projection of a dataset onto `features` (raw values, never band labels).
// Throws kSchemaMismatch for columns that are not numeric.
PointMatrix project(const Dataset& ds, std::span<const std::string> features);

// "C1".."Ck" for indices 0..k-1.
std::string cluster_name(std::size_t index);

}  // namespace edm::kmeans
