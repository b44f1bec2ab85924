#pragma once

// JSON descriptors for Kato functions and (zeros, measure) inputs.
//
//   {"variant": "exp"}
//   {"variant": "resolvent_power", "k": 2}
//   {"variant": "single_pair", "eta": 1.0, "alpha": 0.5}
//   {"variant": "atomic_exp", "s": 2.0, "alpha": 0.25}
//   {"variant": "canonical", "zeros": [[re, im, mult], ...], "atoms": [[s, w], ...],
//    "ac_weight": {"id": "log_resolvent", "k": 1, "scale": 1} | null, "alpha": 0.3 (optional, forced)}

#include <string>

#include "json.hpp"
#include "katolab/kato.hpp"

namespace katolab::kato {

/// Parsed canonical inputs before the budget is applied.
struct CanonicalInput {
  ZeroSet zeros;
  KatoMeasure measure;
  std::optional<double> forced_alpha;
};

/// ConfigParse errors carry `where` as a field path prefix.
CanonicalInput parse_canonical_input(const nlohmann::json& j, const std::string& where = "");
KatoFunction kato_function_from_json(const nlohmann::json& j, const std::string& where = "");

nlohmann::json to_json(const KatoFunction& f);
nlohmann::json to_json(const CanonicalKato& c);

}  // namespace katolab::kato
