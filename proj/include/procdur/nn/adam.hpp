#pragma once

#include <cstdint>
#include <vector>

#include "procdur/nn/net.hpp"

namespace procdur::nn {

struct AdamParams {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment accumulators, parallel to tensor_refs(net).
struct AdamState {
  AdamParams hp;
  std::int64_t t = 0;
  std::vector<Vec> m;
  std::vector<Vec> v;

  void init(SequenceNet& net, const AdamParams& params);
};

// One update: t += 1 first, then bias-corrected moments, then the
// parameter step. Gradient slots must match the net's tensor enumeration.
void adam_step(SequenceNet& net, const Gradients& grads, AdamState& state);

}  // namespace procdur::nn
