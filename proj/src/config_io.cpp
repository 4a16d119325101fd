#include "procdur/config_io.hpp"

#include "procdur/errors.hpp"

namespace procdur {

using nlohmann::json;

json config_to_json(const FusionConfig& config) {
  json j;
  j["use_image"] = config.use_image;
  j["use_tools"] = config.use_tools;
  j["use_device"] = config.use_device;
  j["use_ptype"] = config.use_ptype;
  j["d_img"] = config.d_img;
  j["enc_image"] = config.enc_image;
  j["enc_tools"] = config.enc_tools;
  j["enc_device"] = config.enc_device;
  j["hidden"] = config.hidden;
  j["lr"] = config.lr;
  j["epochs"] = config.epochs;
  j["seed"] = config.seed;
  if (config.clip_norm)
    j["clip_norm"] = *config.clip_norm;
  else
    j["clip_norm"] = nullptr;
  j["epsilon_progress"] = config.epsilon_progress;
  j["preset"] = config.preset;
  return j;
}

namespace {

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError("config", 0, std::string("missing key '") + key + "'");
  return *it;
}

bool get_bool(const json& j, const char* key, bool fallback, bool partial) {
  if (partial && !j.contains(key)) return fallback;
  const json& v = field(j, key);
  if (!v.is_boolean())
    throw ParseError("config", 0, std::string("key '") + key + "' must be a boolean");
  return v.get<bool>();
}

int get_int(const json& j, const char* key, int fallback, bool partial) {
  if (partial && !j.contains(key)) return fallback;
  const json& v = field(j, key);
  if (!v.is_number_integer())
    throw ParseError("config", 0, std::string("key '") + key + "' must be an integer");
  return v.get<int>();
}

double get_real(const json& j, const char* key, double fallback, bool partial) {
  if (partial && !j.contains(key)) return fallback;
  const json& v = field(j, key);
  if (!v.is_number())
    throw ParseError("config", 0, std::string("key '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

FusionConfig config_from_json(const json& j, bool partial) {
  if (!j.is_object()) throw ParseError("config", 0, "config must be an object");
  static const char* known[] = {
      "use_image", "use_tools",  "use_device", "use_ptype",
      "d_img",     "enc_image",  "enc_tools",  "enc_device",
      "hidden",    "lr",         "epochs",     "seed",
      "clip_norm", "epsilon_progress",        "preset"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw ParseError("config", 0, "unknown key '" + it.key() + "'");
  }

  FusionConfig d;  // defaults
  FusionConfig c;
  c.use_image = get_bool(j, "use_image", d.use_image, partial);
  c.use_tools = get_bool(j, "use_tools", d.use_tools, partial);
  c.use_device = get_bool(j, "use_device", d.use_device, partial);
  c.use_ptype = get_bool(j, "use_ptype", d.use_ptype, partial);
  c.d_img = get_int(j, "d_img", d.d_img, partial);
  c.enc_image = get_int(j, "enc_image", d.enc_image, partial);
  c.enc_tools = get_int(j, "enc_tools", d.enc_tools, partial);
  c.enc_device = get_int(j, "enc_device", d.enc_device, partial);
  c.hidden = get_int(j, "hidden", d.hidden, partial);
  c.lr = get_real(j, "lr", d.lr, partial);
  c.epochs = get_int(j, "epochs", d.epochs, partial);
  c.seed = get_int(j, "seed", d.seed, partial);
  if (j.contains("clip_norm") && !j["clip_norm"].is_null()) {
    if (!j["clip_norm"].is_number())
      throw ParseError("config", 0, "key 'clip_norm' must be a number or null");
    c.clip_norm = j["clip_norm"].get<double>();
  } else if (!partial && !j.contains("clip_norm")) {
    throw ParseError("config", 0, "missing key 'clip_norm'");
  }
  c.epsilon_progress =
      get_real(j, "epsilon_progress", d.epsilon_progress, partial);
  if (partial && !j.contains("preset")) {
    c.preset = d.preset;
  } else {
    const json& v = field(j, "preset");
    if (!v.is_string())
      throw ParseError("config", 0, "key 'preset' must be a string");
    c.preset = v.get<std::string>();
  }
  return c;
}

}  // namespace procdur
