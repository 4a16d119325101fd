#pragma once

#include <optional>
#include <string>

#include "procdur/nn/net.hpp"
#include "procdur/record.hpp"

namespace procdur {

// Which channels the network consumes, plus layer sizes and the training
// recipe. Selects the variant: image -> V, tools -> T, device -> D, and
// combinations thereof (TD, VT, VTD).
struct FusionConfig {
  bool use_image = false;
  bool use_tools = false;
  bool use_device = false;
  bool use_ptype = false;
  int d_img = 64;
  int enc_image = 64;
  int enc_tools = 16;
  int enc_device = 16;
  int hidden = 128;
  double lr = 1e-3;
  int epochs = 15;
  int seed = 42;
  std::optional<double> clip_norm;
  double epsilon_progress = 1e-4;
  std::string preset = "desk";

  void validate() const;          // throws ConfigError
  std::string variant_name() const;  // "D-Net", "VTD-Net", ...
  int raw_input_dim() const;         // width of the per-frame raw vector
};

// Overwrites the training recipe with a named preset. "desk" is sized for
// from-scratch minutes-scale runs; "paper" restores lr 1e-6 / 50 epochs.
void apply_preset(FusionConfig& config, const std::string& preset);

struct Model {
  FusionConfig config;
  nn::SequenceNet net;
};

// Seeded initialization: matrices uniform in [-a, a] with
// a = sqrt(6 / (fan_in + fan_out)), biases zero, tensors filled in
// enumeration order from one mt19937_64(seed) stream.
Model build_model(const FusionConfig& config);

// Raw per-frame vector in fixed order: image, tools, device, type one-hot.
// Throws DataError when the frame lacks an enabled channel.
nn::Vec assemble_raw_input(const FusionConfig& config, const Frame& frame,
                           int ptype);

// Same, then through the encoders: the vector the recurrent cell sees.
nn::Vec assemble_input(const Model& model, const Frame& frame, int ptype);

}  // namespace procdur
