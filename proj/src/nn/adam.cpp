#include "procdur/nn/adam.hpp"

#include <cmath>

#include "procdur/errors.hpp"

namespace procdur::nn {

void AdamState::init(SequenceNet& net, const AdamParams& params) {
  hp = params;
  t = 0;
  m.clear();
  v.clear();
  for (const auto& ref : tensor_refs(net)) {
    m.emplace_back(ref.data->size(), 0.0);
    v.emplace_back(ref.data->size(), 0.0);
  }
}

void adam_step(SequenceNet& net, const Gradients& grads, AdamState& state) {
  auto refs = tensor_refs(net);
  if (grads.values.size() != refs.size() || state.m.size() != refs.size())
    throw ShapeError("adam_step: tensor count mismatch");

  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.hp.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.hp.beta2, static_cast<double>(state.t));

  for (size_t i = 0; i < refs.size(); ++i) {
    Vec& p = *refs[i].data;
    const Vec& gr = grads.values[i];
    if (gr.size() != p.size())
      throw ShapeError("adam_step: gradient '" + grads.names[i] +
                       "' has wrong size");
    Vec& mi = state.m[i];
    Vec& vi = state.v[i];
    for (size_t j = 0; j < p.size(); ++j) {
      mi[j] = state.hp.beta1 * mi[j] + (1.0 - state.hp.beta1) * gr[j];
      vi[j] = state.hp.beta2 * vi[j] + (1.0 - state.hp.beta2) * gr[j] * gr[j];
      double m_hat = mi[j] / bc1;
      double v_hat = vi[j] / bc2;
      p[j] -= state.hp.lr * m_hat / (std::sqrt(v_hat) + state.hp.eps);
    }
  }
}

}  // namespace procdur::nn
