#include "procdur/nn/dense.hpp"

#include <cmath>

#include "procdur/errors.hpp"

namespace procdur::nn {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void apply_act(Act act, Vec& v) {
  switch (act) {
    case Act::kSigmoid:
      for (double& x : v) x = sigmoid(x);
      break;
    case Act::kTanh:
      for (double& x : v) x = std::tanh(x);
      break;
    case Act::kRelu:
      for (double& x : v) x = x > 0.0 ? x : 0.0;
      break;
    case Act::kIdentity:
      break;
  }
}

double act_deriv_from_out(Act act, double out) {
  switch (act) {
    case Act::kSigmoid:
      return out * (1.0 - out);
    case Act::kTanh:
      return 1.0 - out * out;
    case Act::kRelu:
      return out > 0.0 ? 1.0 : 0.0;
    case Act::kIdentity:
      return 1.0;
  }
  return 1.0;
}

const char* act_name(Act act) {
  switch (act) {
    case Act::kSigmoid: return "sigmoid";
    case Act::kTanh: return "tanh";
    case Act::kRelu: return "relu";
    case Act::kIdentity: return "identity";
  }
  return "identity";
}

Act act_from_name(const std::string& name) {
  if (name == "sigmoid") return Act::kSigmoid;
  if (name == "tanh") return Act::kTanh;
  if (name == "relu") return Act::kRelu;
  if (name == "identity") return Act::kIdentity;
  throw ConfigError("unknown activation: " + name);
}

Vec dense_forward(const DenseLayer& layer, const Vec& x) {
  if (x.size() != static_cast<size_t>(layer.in())) {
    throw ShapeError("dense_forward: input has " + std::to_string(x.size()) +
                     " values, layer expects " + std::to_string(layer.in()));
  }
  Vec out;
  matvec(layer.w, x, out);
  for (int r = 0; r < layer.out(); ++r) out[static_cast<size_t>(r)] += layer.b[static_cast<size_t>(r)];
  apply_act(layer.act, out);
  return out;
}

}  // namespace procdur::nn
