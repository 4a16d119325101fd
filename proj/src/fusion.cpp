#include "procdur/fusion.hpp"

#include <cmath>
#include <random>

#include "procdur/errors.hpp"
#include "procdur/signals.hpp"
#include "procdur/types.hpp"

namespace procdur {

void FusionConfig::validate() const {
  if (!use_image && !use_tools && !use_device)
    throw ConfigError("no modality enabled (need image, tools or device)");
  if (use_image && d_img <= 0)
    throw ConfigError("d_img must be positive, got " + std::to_string(d_img));
  if (use_image && enc_image <= 0)
    throw ConfigError("enc_image must be positive, got " + std::to_string(enc_image));
  if (use_tools && enc_tools <= 0)
    throw ConfigError("enc_tools must be positive, got " + std::to_string(enc_tools));
  if (use_device && enc_device <= 0)
    throw ConfigError("enc_device must be positive, got " + std::to_string(enc_device));
  if (hidden <= 0)
    throw ConfigError("hidden must be positive, got " + std::to_string(hidden));
  if (!(lr > 0.0) || !std::isfinite(lr))
    throw ConfigError("lr must be positive and finite");
  if (epochs < 0)
    throw ConfigError("epochs must be >= 0, got " + std::to_string(epochs));
  if (clip_norm && (!(*clip_norm > 0.0) || !std::isfinite(*clip_norm)))
    throw ConfigError("clip_norm must be positive and finite when set");
  if (!(epsilon_progress > 0.0) || epsilon_progress > 0.01)
    throw ConfigError("epsilon_progress must lie in (0, 0.01]");
  if (preset != "desk" && preset != "paper")
    throw ConfigError("unknown preset '" + preset + "' (expected desk or paper)");
}

std::string FusionConfig::variant_name() const {
  std::string tag;
  if (use_image) tag += "V";
  if (use_tools) tag += "T";
  if (use_device) tag += "D";
  if (tag.empty()) tag = "?";
  return tag + "-Net";
}

int FusionConfig::raw_input_dim() const {
  int dim = 0;
  if (use_image) dim += d_img;
  if (use_tools) dim += kToolCount;
  if (use_device) dim += kDeviceSignalCount;
  if (use_ptype) dim += kProcedureTypeCount;
  return dim;
}

void apply_preset(FusionConfig& config, const std::string& preset) {
  if (preset == "desk") {
    config.lr = 1e-3;
    config.epochs = 15;
  } else if (preset == "paper") {
    config.lr = 1e-6;
    config.epochs = 50;
  } else {
    throw ConfigError("unknown preset '" + preset + "' (expected desk or paper)");
  }
  config.preset = preset;
}

namespace {

void xavier_fill(nn::Mat& m, std::mt19937_64& rng) {
  double a = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
  std::uniform_real_distribution<double> dist(-a, a);
  for (double& v : m.a) v = dist(rng);
}

}  // namespace

Model build_model(const FusionConfig& config) {
  config.validate();
  Model model;
  model.config = config;

  nn::SequenceNet& net = model.net;
  int offset = 0;
  if (config.use_image) {
    nn::InputBlock b;
    b.name = "image";
    b.offset = offset;
    b.len = config.d_img;
    b.enc = nn::DenseLayer(config.enc_image, config.d_img, nn::Act::kTanh);
    net.blocks.push_back(std::move(b));
    offset += config.d_img;
  }
  if (config.use_tools) {
    nn::InputBlock b;
    b.name = "tools";
    b.offset = offset;
    b.len = kToolCount;
    b.enc = nn::DenseLayer(config.enc_tools, kToolCount, nn::Act::kTanh);
    net.blocks.push_back(std::move(b));
    offset += kToolCount;
  }
  if (config.use_device) {
    nn::InputBlock b;
    b.name = "device";
    b.offset = offset;
    b.len = kDeviceSignalCount;
    b.enc = nn::DenseLayer(config.enc_device, kDeviceSignalCount, nn::Act::kTanh);
    net.blocks.push_back(std::move(b));
    offset += kDeviceSignalCount;
  }
  net.passthrough = config.use_ptype ? kProcedureTypeCount : 0;
  net.cell = nn::GruCell(config.hidden, net.recurrent_input_dim());
  net.head = nn::DenseLayer(1, config.hidden, nn::Act::kSigmoid);

  // Biases stay zero from construction; matrices draw from one stream in
  // tensor enumeration order so (config, seed) pins every parameter.
  std::mt19937_64 rng(static_cast<std::uint64_t>(config.seed));
  for (auto& b : net.blocks) xavier_fill(b.enc.w, rng);
  xavier_fill(net.cell.wz, rng);
  xavier_fill(net.cell.wr, rng);
  xavier_fill(net.cell.wh, rng);
  xavier_fill(net.cell.uz, rng);
  xavier_fill(net.cell.ur, rng);
  xavier_fill(net.cell.uh, rng);
  xavier_fill(net.head.w, rng);
  return model;
}

nn::Vec assemble_raw_input(const FusionConfig& config, const Frame& frame,
                           int ptype) {
  nn::Vec raw;
  raw.reserve(static_cast<size_t>(config.raw_input_dim()));
  if (config.use_image) {
    if (static_cast<int>(frame.image.size()) != config.d_img)
      throw DataError("frame t=" + std::to_string(frame.t) + " carries " +
                      std::to_string(frame.image.size()) +
                      " image dims, config expects " +
                      std::to_string(config.d_img));
    raw.insert(raw.end(), frame.image.begin(), frame.image.end());
  }
  if (config.use_tools) {
    if (static_cast<int>(frame.tools.size()) != kToolCount)
      throw DataError("frame t=" + std::to_string(frame.t) +
                      " lacks the tool channel");
    raw.insert(raw.end(), frame.tools.begin(), frame.tools.end());
  }
  if (config.use_device) {
    if (static_cast<int>(frame.device.size()) != kDeviceSignalCount)
      throw DataError("frame t=" + std::to_string(frame.t) +
                      " lacks the device channel");
    raw.insert(raw.end(), frame.device.begin(), frame.device.end());
  }
  if (config.use_ptype) {
    auto hot = one_hot_type(ptype);
    raw.insert(raw.end(), hot.begin(), hot.end());
  }
  return raw;
}

nn::Vec assemble_input(const Model& model, const Frame& frame, int ptype) {
  nn::Vec raw = assemble_raw_input(model.config, frame, ptype);
  return nn::assemble_recurrent_input(model.net, raw);
}

}  // namespace procdur
