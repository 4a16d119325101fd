#include "procdur/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "procdur/config_io.hpp"
#include "procdur/errors.hpp"
#include "procdur/nn/gru.hpp"

namespace procdur {

using nlohmann::json;

void save_checkpoint(const Model& model, const std::string& path,
                     const nn::AdamState* adam) {
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["kind"] = "procdur-checkpoint";
  j["gru_convention"] = nn::kGruConvention;
  j["config"] = config_to_json(model.config);
  j["seed"] = model.config.seed;

  json tensors = json::array();
  auto& net_mut = const_cast<Model&>(model).net;
  for (const auto& ref : nn::tensor_refs(net_mut)) {
    json t;
    t["name"] = ref.name;
    t["size"] = ref.data->size();
    t["data"] = *ref.data;
    tensors.push_back(std::move(t));
  }
  j["tensors"] = std::move(tensors);

  if (adam) {
    json a;
    a["t"] = adam->t;
    a["lr"] = adam->hp.lr;
    a["beta1"] = adam->hp.beta1;
    a["beta2"] = adam->hp.beta2;
    a["eps"] = adam->hp.eps;
    a["m"] = adam->m;
    a["v"] = adam->v;
    j["adam_state"] = std::move(a);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path, 0, std::string("not a valid checkpoint: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(path, 0, "checkpoint root must be an object");

  auto need = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(path, 0, std::string("missing key '") + key + "'");
    return *it;
  };

  const json& ver = need("format_version");
  if (!ver.is_number_integer() || ver.get<int>() != kCheckpointFormatVersion)
    throw ConfigError("checkpoint '" + path + "' has format_version " +
                      ver.dump() + ", expected " +
                      std::to_string(kCheckpointFormatVersion));
  const json& conv = need("gru_convention");
  if (!conv.is_string() || conv.get<std::string>() != nn::kGruConvention)
    throw ConfigError("checkpoint '" + path + "' uses recurrent convention " +
                      conv.dump() + ", this build implements '" +
                      std::string(nn::kGruConvention) + "'");

  FusionConfig config;
  try {
    config = config_from_json(need("config"));
  } catch (const ParseError& e) {
    throw ParseError(path, 0, e.what());
  }
  config.validate();

  LoadedCheckpoint loaded;
  loaded.model = build_model(config);
  auto refs = nn::tensor_refs(loaded.model.net);

  const json& tensors = need("tensors");
  if (!tensors.is_array() || tensors.size() != refs.size())
    throw ShapeError("checkpoint '" + path + "' carries " +
                     std::to_string(tensors.is_array() ? tensors.size() : 0) +
                     " tensors, config implies " + std::to_string(refs.size()));
  for (size_t i = 0; i < refs.size(); ++i) {
    const json& t = tensors[i];
    if (!t.is_object() || !t.contains("name") || !t.contains("data"))
      throw ParseError(path, 0, "tensor entry " + std::to_string(i) + " malformed");
    if (t["name"].get<std::string>() != refs[i].name)
      throw ShapeError("checkpoint '" + path + "' tensor " + std::to_string(i) +
                       " is '" + t["name"].get<std::string>() + "', expected '" +
                       refs[i].name + "'");
    const json& data = t["data"];
    if (!data.is_array() || data.size() != refs[i].data->size())
      throw ShapeError("checkpoint '" + path + "' tensor '" + refs[i].name +
                       "' has " + std::to_string(data.size()) +
                       " values, expected " +
                       std::to_string(refs[i].data->size()));
    for (size_t k = 0; k < data.size(); ++k) {
      if (!data[k].is_number())
        throw ParseError(path, 0, "tensor '" + refs[i].name +
                                      "' holds a non-numeric value");
      (*refs[i].data)[k] = data[k].get<double>();
    }
  }

  if (j.contains("adam_state") && !j["adam_state"].is_null()) {
    const json& a = j["adam_state"];
    if (!a.is_object()) throw ParseError(path, 0, "adam_state must be an object");
    nn::AdamState state;
    nn::AdamParams hp;
    hp.lr = a.at("lr").get<double>();
    hp.beta1 = a.at("beta1").get<double>();
    hp.beta2 = a.at("beta2").get<double>();
    hp.eps = a.at("eps").get<double>();
    state.init(loaded.model.net, hp);
    state.t = a.at("t").get<std::int64_t>();
    const json& m = a.at("m");
    const json& v = a.at("v");
    if (!m.is_array() || m.size() != refs.size() || !v.is_array() ||
        v.size() != refs.size())
      throw ShapeError("checkpoint '" + path + "' adam_state tensor count mismatch");
    for (size_t i = 0; i < refs.size(); ++i) {
      if (m[i].size() != state.m[i].size() || v[i].size() != state.v[i].size())
        throw ShapeError("checkpoint '" + path + "' adam_state dims mismatch at '" +
                         refs[i].name + "'");
      for (size_t k = 0; k < state.m[i].size(); ++k) {
        state.m[i][k] = m[i][k].get<double>();
        state.v[i][k] = v[i][k].get<double>();
      }
    }
    loaded.adam = std::move(state);
  }

  return loaded;
}

}  // namespace procdur
