#pragma once

#include "procdur/nn/linalg.hpp"

namespace procdur::nn {

// Gated recurrent cell. Convention (the original formulation, reset gate
// applied inside the candidate):
//
//   z = sigmoid(Wz x + Uz h + bz)          update gate
//   r = sigmoid(Wr x + Ur h + br)          reset gate
//   c = tanh(Wh x + Uh (r*h) + bh)         candidate state
//   h' = (1-z)*h + z*c
//
// Checkpoints tag this convention as "reset-inside-candidate".
inline constexpr const char* kGruConvention = "reset-inside-candidate";

struct GruCell {
  Mat wz, wr, wh;  // hidden x input
  Mat uz, ur, uh;  // hidden x hidden
  Vec bz, br, bh;  // hidden

  GruCell() = default;
  GruCell(int hidden, int input)
      : wz(hidden, input), wr(hidden, input), wh(hidden, input),
        uz(hidden, hidden), ur(hidden, hidden), uh(hidden, hidden),
        bz(static_cast<size_t>(hidden), 0.0),
        br(static_cast<size_t>(hidden), 0.0),
        bh(static_cast<size_t>(hidden), 0.0) {}

  int hidden() const { return wz.rows; }
  int input() const { return wz.cols; }
};

// Gate values of one step, retained for backpropagation.
struct GruGates {
  Vec z, r, c;
};

// Advances the state one step; if `gates` is non-null the gate activations
// are stored there. Throws ShapeError on dimension mismatch.
Vec gru_step(const GruCell& cell, const Vec& h_prev, const Vec& x,
             GruGates* gates = nullptr);

}  // namespace procdur::nn
