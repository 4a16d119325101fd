#include "procdur/nn/gru.hpp"

#include <cmath>

#include "procdur/errors.hpp"
#include "procdur/nn/dense.hpp"

namespace procdur::nn {

Vec gru_step(const GruCell& cell, const Vec& h_prev, const Vec& x, GruGates* gates) {
  const int h = cell.hidden();
  if (h_prev.size() != static_cast<size_t>(h) || x.size() != static_cast<size_t>(cell.input())) {
    throw ShapeError("gru_step: dimension mismatch (hidden " + std::to_string(h) +
                     ", input " + std::to_string(cell.input()) + ")");
  }

  Vec z = cell.bz;
  matvec_acc(cell.wz, x, z);
  matvec_acc(cell.uz, h_prev, z);
  for (double& v : z) v = sigmoid(v);

  Vec r = cell.br;
  matvec_acc(cell.wr, x, r);
  matvec_acc(cell.ur, h_prev, r);
  for (double& v : r) v = sigmoid(v);

  Vec rh(static_cast<size_t>(h));
  for (int i = 0; i < h; ++i) rh[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] * h_prev[static_cast<size_t>(i)];

  Vec c = cell.bh;
  matvec_acc(cell.wh, x, c);
  matvec_acc(cell.uh, rh, c);
  for (double& v : c) v = std::tanh(v);

  Vec h_next(static_cast<size_t>(h));
  for (int i = 0; i < h; ++i) {
    const size_t k = static_cast<size_t>(i);
    h_next[k] = (1.0 - z[k]) * h_prev[k] + z[k] * c[k];
  }

  if (gates) {
    gates->z = std::move(z);
    gates->r = std::move(r);
    gates->c = std::move(c);
  }
  return h_next;
}

}  // namespace procdur::nn
