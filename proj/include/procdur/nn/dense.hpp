#pragma once

#include <string>

#include "procdur/nn/linalg.hpp"

namespace procdur::nn {

enum class Act { kSigmoid, kTanh, kRelu, kIdentity };

double sigmoid(double x);
void apply_act(Act act, Vec& v);
// Activation derivative computed from the activation's output value;
// valid for all four kinds (relu uses out > 0 as the mask).
double act_deriv_from_out(Act act, double out);

const char* act_name(Act act);
Act act_from_name(const std::string& name);

struct DenseLayer {
  Mat w;  // out x in
  Vec b;  // out
  Act act = Act::kIdentity;

  DenseLayer() = default;
  DenseLayer(int out_dim, int in_dim, Act a)
      : w(out_dim, in_dim), b(static_cast<size_t>(out_dim), 0.0), act(a) {}

  int in() const { return w.cols; }
  int out() const { return w.rows; }
};

// activation(W x + b); throws ShapeError on dimension mismatch.
Vec dense_forward(const DenseLayer& layer, const Vec& x);

}  // namespace procdur::nn
