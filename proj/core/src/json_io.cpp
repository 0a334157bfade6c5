#include "json_io.hpp"

namespace edm::detail {

json to_json(const BandSpec& bands) {
  json out = json::array();
  for (const auto& b : bands) {
    out.push_back({{"label", b.label}, {"lower", b.lower}, {"upper", b.upper}});
  }
  return out;
}

BandSpec bands_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kInvalidConfig, "bands must be an array");
  BandSpec bands;
  for (const auto& item : j) {
    bands.push_back({require<std::string>(item, "label", "band"),
                     require<double>(item, "lower", "band"),
                     require<double>(item, "upper", "band")});
  }
  return bands;
}

json to_json(const FeatureSpec& spec) {
  json out = {{"name", spec.name},
              {"kind", spec.kind == FeatureKind::kNumeric ? "numeric" : "categorical"}};
  if (!spec.categories.empty()) out["categories"] = spec.categories;
  if (spec.name != columns::kCoaching) out["range"] = {spec.range.min, spec.range.max};
  if (spec.banded()) out["bands"] = to_json(spec.bands);
  return out;
}

FeatureSpec feature_from_json(const json& j) {
  FeatureSpec spec;
  spec.name = require<std::string>(j, "name", "feature");
  const auto kind = require<std::string>(j, "kind", "feature " + spec.name);
  if (kind == "numeric") {
    spec.kind = FeatureKind::kNumeric;
  } else if (kind == "categorical") {
    spec.kind = FeatureKind::kCategorical;
  } else {
    throw Error(ErrorKind::kInvalidConfig, "feature " + spec.name + " has unknown kind '" + kind + "'");
  }
  spec.categories = get_or<std::vector<std::string>>(j, "categories", {}, "feature " + spec.name);
  if (j.contains("range")) {
    auto range = get_or<std::vector<double>>(j, "range", {}, "feature " + spec.name);
    if (range.size() != 2) {
      throw Error(ErrorKind::kInvalidConfig, "feature " + spec.name + " range needs [min, max]");
    }
    spec.range = {range[0], range[1]};
  }
  if (j.contains("bands")) spec.bands = bands_from_json(j.at("bands"));
  return spec;
}

}  // namespace edm::detail
