#pragma once

#include <optional>
#include <string>

#include "procdur/estimator.hpp"

namespace procdur {

inline constexpr int kCheckpointFormatVersion = 1;

// Structured-text checkpoint: format_version, config, the GRU convention
// tag, seed, every parameter tensor with its dims, and (optionally) the
// Adam state. Doubles are written in shortest round-trip decimal form, so
// save -> load reproduces parameters bitwise.
void save_checkpoint(const Model& model, const std::string& path,
                     const nn::AdamState* adam = nullptr);

struct LoadedCheckpoint {
  Model model;
  std::optional<nn::AdamState> adam;
};

// Throws IoError (unreadable), ParseError (malformed or truncated),
// ConfigError (version or convention mismatch), ShapeError (tensor dims
// inconsistent with the config).
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace procdur
