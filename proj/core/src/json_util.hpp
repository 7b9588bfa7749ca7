#pragma once

#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "mapx/errors.hpp"
#include "mapx/world_model.hpp"

namespace mapx::detail {

using json = nlohmann::json;

// Twelve decimals keep logs identical across libm implementations that differ
// in the last ulp.
inline double rounded(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::round(x * 1e12) / 1e12;
  return r == 0.0 ? 0.0 : r;
}

inline json point(Intersection p) { return json::array({p.x, p.y}); }

inline void require_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace mapx::detail
