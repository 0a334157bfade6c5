#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edm/dataset.hpp"

namespace edm::nbayes {

struct FitOptions {
  double alpha = 1.0;            // Laplace pseudo-count, >= 0
  double variance_floor = 1e-9;  // > 0
};

struct Gaussian {
  double mean = 0.0;
  double variance = 0.0;

  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

// Conditional distribution of one feature given each class. Categorical
// features fill `probabilities[class][category]` (categories as in
// spec.categories); numeric features fill `gaussians[class]`.
struct FeatureModel {
  FeatureSpec spec;
  std::vector<std::vector<double>> probabilities;
  std::vector<Gaussian> gaussians;

  friend bool operator==(const FeatureModel&, const FeatureModel&) = default;
};

// Immutable after construction. The constructor enforces the model invariants
// (priors and every categorical table sum to 1, variances >= floor) and throws
// kInvalidArgument otherwise.
class NaiveBayesModel {
 public:
  NaiveBayesModel(std::string label, std::vector<std::string> classes, std::vector<double> priors,
                  std::vector<FeatureModel> features, double alpha, double variance_floor);

  const std::string& label() const { return label_; }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<FeatureModel>& features() const { return features_; }
  double alpha() const { return alpha_; }
  double variance_floor() const { return variance_floor_; }
  std::string schema_fingerprint() const;

  const FeatureModel& feature(std::string_view name) const;

  friend bool operator==(const NaiveBayesModel&, const NaiveBayesModel&) = default;

 private:
  std::string label_;
  std::vector<std::string> classes_;
  std::vector<double> priors_;
  std::vector<FeatureModel> features_;
  double alpha_;
  double variance_floor_;
};

// Generic fit over observations aligned with `features`. Classes are ordered
// by first appearance in `labels`.
NaiveBayesModel fit(std::span<const FeatureSpec> features,
                    std::span<const std::vector<Cell>> observations,
                    std::span<const std::string> labels, std::string label_name,
                    const FitOptions& options = {});

// Fits on a Dataset. An empty `features` list means every schema feature
// except the label. The label must be categorical in the dataset's view.
NaiveBayesModel fit(const Dataset& train, std::string_view label,
                    std::span<const std::string> features = {}, const FitOptions& options = {});

// Unnormalized log joint, log P(c) + sum_f log P(x_f | c), per class.
std::vector<double> log_scores(const NaiveBayesModel& model, std::span<const Cell> observation);

std::vector<double> posterior(const NaiveBayesModel& model, std::span<const Cell> observation);
std::vector<double> posterior(const NaiveBayesModel& model, const StudentRecord& record);

// First maximum wins.
std::size_t argmax(std::span<const double> scores);

std::string predict(const NaiveBayesModel& model, std::span<const Cell> observation);
std::string predict(const NaiveBayesModel& model, const StudentRecord& record);

// Projects a record onto the model's features (band labels for banded ones).
std::vector<Cell> observe(const NaiveBayesModel& model, const StudentRecord& record);

// Versioned JSON document. Doubles are written in shortest round-trip form, so
// a loaded model predicts bit-identically.
std::string to_json(const NaiveBayesModel& model);

// Throws kInvalidConfig on a malformed document, unsupported version, or a
// schema fingerprint that does not match the stored features.
NaiveBayesModel from_json(std::string_view text);

}  // namespace edm::nbayes
