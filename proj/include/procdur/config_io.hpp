#pragma once

#include <json.hpp>

#include "procdur/fusion.hpp"

namespace procdur {

// JSON image of a FusionConfig; key set is fixed and round-trips exactly.
nlohmann::json config_to_json(const FusionConfig& config);

// Strict parse: unknown keys and wrong types are ParseError (with the
// offending key named); missing keys fall back to defaults only when
// `partial` is true.
FusionConfig config_from_json(const nlohmann::json& j, bool partial = false);

}  // namespace procdur
