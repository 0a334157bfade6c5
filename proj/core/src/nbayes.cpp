#include "edm/nbayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "edm/error.hpp"
#include "json_io.hpp"

namespace edm::nbayes {
namespace {

constexpr double kSumTolerance = 1e-9;
constexpr std::string_view kFormat = "edmkit.naive_bayes";
constexpr int kVersion = 1;

std::size_t category_index(const FeatureSpec& spec, const Cell& cell) {
  const auto* text = std::get_if<std::string>(&cell);
  if (text == nullptr) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("feature '{}' expects a category, got a number", spec.name));
  }
  auto it = std::find(spec.categories.begin(), spec.categories.end(), *text);
  if (it == spec.categories.end()) {
    throw Error(ErrorKind::kUnknownCategory,
                fmt::format("'{}' is not in the domain of feature '{}'", *text, spec.name));
  }
  return static_cast<std::size_t>(it - spec.categories.begin());
}

double numeric_cell(const FeatureSpec& spec, const Cell& cell) {
  const auto* value = std::get_if<double>(&cell);
  if (value == nullptr) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("feature '{}' expects a number, got '{}'", spec.name,
                            std::get<std::string>(cell)));
  }
  return *value;
}

void check_sums_to_one(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw Error(ErrorKind::kInvalidArgument, what + " has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorKind::kInvalidArgument, fmt::format("{} sums to {}, not 1", what, sum));
  }
}

}  // namespace

NaiveBayesModel::NaiveBayesModel(std::string label, std::vector<std::string> classes,
                                 std::vector<double> priors, std::vector<FeatureModel> features,
                                 double alpha, double variance_floor)
    : label_(std::move(label)),
      classes_(std::move(classes)),
      priors_(std::move(priors)),
      features_(std::move(features)),
      alpha_(alpha),
      variance_floor_(variance_floor) {
  if (classes_.empty()) throw Error(ErrorKind::kInvalidArgument, "model has no classes");
  if (priors_.size() != classes_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "one prior per class required");
  }
  if (!(alpha_ >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "alpha must be >= 0");
  if (!(variance_floor_ > 0.0)) throw Error(ErrorKind::kInvalidArgument, "variance floor must be > 0");
  check_sums_to_one(priors_, "priors");

  const std::size_t k = classes_.size();
  for (const auto& f : features_) {
    if (f.spec.kind == FeatureKind::kCategorical) {
      if (f.probabilities.size() != k) {
        throw Error(ErrorKind::kInvalidArgument, fmt::format("feature '{}': one table per class required", f.spec.name));
      }
      for (std::size_t c = 0; c < k; ++c) {
        if (f.probabilities[c].size() != f.spec.categories.size()) {
          throw Error(ErrorKind::kInvalidArgument, fmt::format("feature '{}': table size differs from domain", f.spec.name));
        }
        check_sums_to_one(f.probabilities[c], fmt::format("feature '{}' table for '{}'", f.spec.name, classes_[c]));
      }
    } else {
      if (f.gaussians.size() != k) {
        throw Error(ErrorKind::kInvalidArgument, fmt::format("feature '{}': one Gaussian per class required", f.spec.name));
      }
      for (const auto& g : f.gaussians) {
        if (!(g.variance >= variance_floor_) || !std::isfinite(g.mean)) {
          throw Error(ErrorKind::kInvalidArgument, fmt::format("feature '{}': variance below floor", f.spec.name));
        }
      }
    }
  }
}

std::string NaiveBayesModel::schema_fingerprint() const {
  std::vector<FeatureSpec> specs;
  for (const auto& f : features_) specs.push_back(f.spec);
  return fingerprint_features(specs);
}

const FeatureModel& NaiveBayesModel::feature(std::string_view name) const {
  for (const auto& f : features_) {
    if (f.spec.name == name) return f;
  }
  throw Error(ErrorKind::kSchemaMismatch, fmt::format("model has no feature '{}'", name));
}

NaiveBayesModel fit(std::span<const FeatureSpec> features,
                    std::span<const std::vector<Cell>> observations,
                    std::span<const std::string> labels, std::string label_name,
                    const FitOptions& options) {
  if (!(options.alpha >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "alpha must be >= 0");
  if (!(options.variance_floor > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "variance floor must be > 0");
  }
  if (observations.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidArgument, "observations and labels differ in length");
  }
  if (observations.empty()) throw Error(ErrorKind::kInsufficientData, "training set is empty");

  std::vector<std::string> classes;
  std::vector<std::size_t> class_of(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(classes.begin(), classes.end(), labels[i]);
    if (it == classes.end()) {
      classes.push_back(labels[i]);
      it = classes.end() - 1;
    }
    class_of[i] = static_cast<std::size_t>(it - classes.begin());
  }
  const std::size_t k = classes.size();
  const auto n = static_cast<double>(labels.size());

  std::vector<double> class_count(k, 0.0);
  for (auto c : class_of) class_count[c] += 1.0;
  std::vector<double> priors(k);
  for (std::size_t c = 0; c < k; ++c) priors[c] = class_count[c] / n;

  for (const auto& obs : observations) {
    if (obs.size() != features.size()) {
      throw Error(ErrorKind::kInvalidArgument, "observation width differs from feature count");
    }
  }

  std::vector<FeatureModel> models;
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& spec = features[f];
    FeatureModel model{spec, {}, {}};
    if (spec.kind == FeatureKind::kCategorical) {
      const std::size_t domain = spec.categories.size();
      if (domain == 0) {
        throw Error(ErrorKind::kInvalidArgument, fmt::format("feature '{}' has an empty domain", spec.name));
      }
      std::vector<std::vector<double>> counts(k, std::vector<double>(domain, 0.0));
      for (std::size_t i = 0; i < observations.size(); ++i) {
        counts[class_of[i]][category_index(spec, observations[i][f])] += 1.0;
      }
      model.probabilities.assign(k, std::vector<double>(domain));
      for (std::size_t c = 0; c < k; ++c) {
        const double denom = class_count[c] + options.alpha * static_cast<double>(domain);
        for (std::size_t v = 0; v < domain; ++v) {
          model.probabilities[c][v] = (counts[c][v] + options.alpha) / denom;
        }
      }
    } else {
      std::vector<double> sum(k, 0.0);
      for (std::size_t i = 0; i < observations.size(); ++i) {
        sum[class_of[i]] += numeric_cell(spec, observations[i][f]);
      }
      std::vector<double> mean(k);
      for (std::size_t c = 0; c < k; ++c) mean[c] = sum[c] / class_count[c];
      std::vector<double> sq(k, 0.0);
      for (std::size_t i = 0; i < observations.size(); ++i) {
        const double d = std::get<double>(observations[i][f]) - mean[class_of[i]];
        sq[class_of[i]] += d * d;
      }
      for (std::size_t c = 0; c < k; ++c) {
        // Unbiased; a single sample has no spread estimate and takes the floor.
        const double var = class_count[c] > 1.0 ? sq[c] / (class_count[c] - 1.0) : 0.0;
        model.gaussians.push_back({mean[c], std::max(var, options.variance_floor)});
      }
    }
    models.push_back(std::move(model));
  }
  return NaiveBayesModel(std::move(label_name), std::move(classes), std::move(priors),
                         std::move(models), options.alpha, options.variance_floor);
}

NaiveBayesModel fit(const Dataset& train, std::string_view label,
                    std::span<const std::string> features, const FitOptions& options) {
  std::vector<FeatureSpec> specs;
  if (features.empty()) {
    for (const auto& spec : train.schema().features()) {
      if (spec.name != label) specs.push_back(spec);
    }
  } else {
    for (const auto& name : features) {
      if (name == label) {
        throw Error(ErrorKind::kInvalidArgument, fmt::format("label '{}' cannot also be a feature", name));
      }
      specs.push_back(train.schema().at(name));
    }
  }
  if (train.empty()) throw Error(ErrorKind::kInsufficientData, "training set is empty");

  std::vector<std::vector<Cell>> observations;
  std::vector<std::string> labels;
  observations.reserve(train.size());
  labels.reserve(train.size());
  for (const auto& row : train.rows()) {
    Cell y = train.value(row, label);
    if (!std::holds_alternative<std::string>(y)) {
      throw Error(ErrorKind::kInvalidArgument, fmt::format("label '{}' is not categorical", label));
    }
    labels.push_back(std::get<std::string>(std::move(y)));
    std::vector<Cell> obs;
    obs.reserve(specs.size());
    for (const auto& spec : specs) obs.push_back(feature_value(spec, row));
    observations.push_back(std::move(obs));
  }
  return fit(specs, observations, labels, std::string(label), options);
}

std::vector<double> log_scores(const NaiveBayesModel& model, std::span<const Cell> observation) {
  const auto& features = model.features();
  if (observation.size() != features.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("observation has {} values, model expects {}", observation.size(),
                            features.size()));
  }
  const std::size_t k = model.classes().size();
  std::vector<double> scores(k);
  for (std::size_t c = 0; c < k; ++c) scores[c] = std::log(model.priors()[c]);

  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& fm = features[f];
    if (fm.spec.kind == FeatureKind::kCategorical) {
      const auto v = category_index(fm.spec, observation[f]);
      for (std::size_t c = 0; c < k; ++c) scores[c] += std::log(fm.probabilities[c][v]);
    } else {
      const double x = numeric_cell(fm.spec, observation[f]);
      for (std::size_t c = 0; c < k; ++c) {
        const auto& g = fm.gaussians[c];
        const double d = x - g.mean;
        scores[c] += -0.5 * (std::log(2.0 * std::numbers::pi * g.variance) + d * d / g.variance);
      }
    }
  }
  return scores;
}

std::vector<double> posterior(const NaiveBayesModel& model, std::span<const Cell> observation) {
  const auto scores = log_scores(model, observation);
  const double top = *std::max_element(scores.begin(), scores.end());
  if (top == -std::numeric_limits<double>::infinity()) {
    // Zero likelihood under every class (only reachable with alpha = 0).
    return model.priors();
  }
  std::vector<double> p(scores.size());
  double total = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    p[c] = std::exp(scores[c] - top);
    total += p[c];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::vector<Cell> observe(const NaiveBayesModel& model, const StudentRecord& record) {
  std::vector<Cell> obs;
  obs.reserve(model.features().size());
  for (const auto& f : model.features()) obs.push_back(feature_value(f.spec, record));
  return obs;
}

std::vector<double> posterior(const NaiveBayesModel& model, const StudentRecord& record) {
  return posterior(model, observe(model, record));
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::string predict(const NaiveBayesModel& model, std::span<const Cell> observation) {
  return model.classes()[argmax(posterior(model, observation))];
}

std::string predict(const NaiveBayesModel& model, const StudentRecord& record) {
  return predict(model, observe(model, record));
}

std::string to_json(const NaiveBayesModel& model) {
  using detail::json;
  json features = json::array();
  for (const auto& f : model.features()) {
    json entry = detail::to_json(f.spec);
    if (f.spec.kind == FeatureKind::kCategorical) {
      entry["probabilities"] = f.probabilities;
    } else {
      json gaussians = json::array();
      for (const auto& g : f.gaussians) gaussians.push_back({{"mean", g.mean}, {"variance", g.variance}});
      entry["gaussians"] = std::move(gaussians);
    }
    features.push_back(std::move(entry));
  }
  json doc = {
      {"format", kFormat},
      {"version", kVersion},
      {"schema_fingerprint", model.schema_fingerprint()},
      {"label", model.label()},
      {"classes", model.classes()},
      {"priors", model.priors()},
      {"alpha", model.alpha()},
      {"variance_floor", model.variance_floor()},
      {"features", std::move(features)},
  };
  return doc.dump(2) + "\n";
}

NaiveBayesModel from_json(std::string_view text) {
  using detail::json;
  using detail::require;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kInvalidConfig, fmt::format("model document is not valid JSON: {}", e.what()));
  }
  if (require<std::string>(doc, "format", "model") != kFormat) {
    throw Error(ErrorKind::kInvalidConfig, "not a naive Bayes model document");
  }
  if (const int version = require<int>(doc, "version", "model"); version != kVersion) {
    throw Error(ErrorKind::kInvalidConfig, fmt::format("unsupported model version {}", version));
  }
  std::vector<FeatureModel> features;
  for (const auto& entry : require<json>(doc, "features", "model")) {
    FeatureModel fm{detail::feature_from_json(entry), {}, {}};
    if (fm.spec.kind == FeatureKind::kCategorical) {
      fm.probabilities = require<std::vector<std::vector<double>>>(entry, "probabilities", fm.spec.name);
    } else {
      for (const auto& g : require<json>(entry, "gaussians", fm.spec.name)) {
        fm.gaussians.push_back({require<double>(g, "mean", fm.spec.name),
                                require<double>(g, "variance", fm.spec.name)});
      }
    }
    features.push_back(std::move(fm));
  }
  try {
    NaiveBayesModel model(require<std::string>(doc, "label", "model"),
                          require<std::vector<std::string>>(doc, "classes", "model"),
                          require<std::vector<double>>(doc, "priors", "model"), std::move(features),
                          require<double>(doc, "alpha", "model"),
                          require<double>(doc, "variance_floor", "model"));
    if (model.schema_fingerprint() != require<std::string>(doc, "schema_fingerprint", "model")) {
      throw Error(ErrorKind::kInvalidConfig, "model schema fingerprint does not match its features");
    }
    return model;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidConfig) throw;
    throw Error(ErrorKind::kInvalidConfig, fmt::format("invalid model: {}", e.what()));
  }
}

}  // namespace edm::nbayes
