#pragma once

// Shared JSON mapping for schema pieces (config files and model documents).

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "edm/dataset.hpp"
#include "edm/error.hpp"

namespace edm::detail {

using nlohmann::json;

nlohmann::json to_json(const BandSpec& bands);
BandSpec bands_from_json(const json& j);

nlohmann::json to_json(const FeatureSpec& spec);
FeatureSpec feature_from_json(const json& j);

// Fetches a typed member; throws kInvalidConfig naming `where` on type errors.
template <typename T>
T get_or(const json& j, std::string_view key, T fallback, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kInvalidConfig,
                std::string(where) + "." + std::string(key) + " has the wrong type");
  }
}

template <typename T>
T require(const json& j, std::string_view key, std::string_view where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::kInvalidConfig,
                std::string(where) + " is missing '" + std::string(key) + "'");
  }
  return get_or<T>(j, key, T{}, where);
}

}  // namespace edm::detail
