#include "procdur/nn/net.hpp"

#include <cmath>
#include <cstddef>

#include "procdur/errors.hpp"

namespace procdur::nn {

int SequenceNet::input_dim() const {
  int dim = passthrough;
  for (const auto& b : blocks) dim = std::max(dim, b.offset + b.len);
  // Blocks tile the front of the raw vector; passthrough is the tail.
  int front = 0;
  for (const auto& b : blocks) front += b.len;
  return front + passthrough;
}

int SequenceNet::recurrent_input_dim() const {
  int dim = passthrough;
  for (const auto& b : blocks) dim += b.out_dim();
  return dim;
}

Vec assemble_recurrent_input(const SequenceNet& net, const Vec& raw) {
  const int raw_dim = net.input_dim();
  if (static_cast<int>(raw.size()) != raw_dim)
    throw ShapeError("assemble_recurrent_input: raw has " +
                     std::to_string(raw.size()) + " dims, net expects " +
                     std::to_string(raw_dim));
  Vec u;
  u.reserve(static_cast<size_t>(net.recurrent_input_dim()));
  for (const auto& b : net.blocks) {
    if (b.encoded) {
      if (b.enc.in() != b.len)
        throw ShapeError("block '" + b.name + "': encoder expects " +
                         std::to_string(b.enc.in()) + " inputs, slice has " +
                         std::to_string(b.len));
      Vec slice(raw.begin() + b.offset, raw.begin() + b.offset + b.len);
      Vec enc = dense_forward(b.enc, slice);
      u.insert(u.end(), enc.begin(), enc.end());
    } else {
      u.insert(u.end(), raw.begin() + b.offset, raw.begin() + b.offset + b.len);
    }
  }
  u.insert(u.end(), raw.end() - net.passthrough, raw.end());
  return u;
}

double net_step(const SequenceNet& net, const Vec& raw, Vec& h, StepCache* cache) {
  if (static_cast<int>(h.size()) != net.hidden_dim())
    throw ShapeError("net_step: state has " + std::to_string(h.size()) +
                     " dims, net expects " + std::to_string(net.hidden_dim()));
  Vec u = assemble_recurrent_input(net, raw);
  Vec h_prev = h;
  GruGates gates;
  h = gru_step(net.cell, h_prev, u, cache ? &gates : nullptr);
  Vec out = dense_forward(net.head, h);
  double y = out[0];
  if (cache) {
    cache->raw = raw;
    cache->u = std::move(u);
    cache->h_prev = std::move(h_prev);
    cache->gates = std::move(gates);
    cache->h = h;
    cache->y = y;
  }
  return y;
}

std::vector<double> forward_sequence(const SequenceNet& net,
                                     const std::vector<Vec>& inputs,
                                     SeqCache* cache) {
  if (cache) {
    cache->steps.clear();
    cache->steps.resize(inputs.size());
  }
  Vec h(static_cast<size_t>(net.hidden_dim()), 0.0);
  std::vector<double> ys;
  ys.reserve(inputs.size());
  for (size_t i = 0; i < inputs.size(); ++i) {
    double y = net_step(net, inputs[i], h, cache ? &cache->steps[i] : nullptr);
    if (!std::isfinite(y))
      throw TrainError("non-finite network output at step " + std::to_string(i + 1));
    for (double v : h)
      if (!std::isfinite(v))
        throw TrainError("non-finite hidden state at step " + std::to_string(i + 1));
    ys.push_back(y);
  }
  return ys;
}

double bce_loss(const std::vector<double>& y, const std::vector<double>& labels) {
  if (y.size() != labels.size())
    throw ShapeError("bce_loss: " + std::to_string(y.size()) + " outputs vs " +
                     std::to_string(labels.size()) + " labels");
  if (y.empty()) throw ShapeError("bce_loss: empty sequence");
  double acc = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    double yi = y[i];
    double li = labels[i];
    acc += -(li * std::log(yi) + (1.0 - li) * std::log(1.0 - yi));
  }
  return acc / static_cast<double>(y.size());
}

std::vector<TensorRef> tensor_refs(SequenceNet& net) {
  std::vector<TensorRef> refs;
  for (auto& b : net.blocks) {
    if (!b.encoded) continue;
    refs.push_back({"enc." + b.name + ".w", &b.enc.w.a});
    refs.push_back({"enc." + b.name + ".b", &b.enc.b});
  }
  refs.push_back({"gru.wz", &net.cell.wz.a});
  refs.push_back({"gru.wr", &net.cell.wr.a});
  refs.push_back({"gru.wh", &net.cell.wh.a});
  refs.push_back({"gru.uz", &net.cell.uz.a});
  refs.push_back({"gru.ur", &net.cell.ur.a});
  refs.push_back({"gru.uh", &net.cell.uh.a});
  refs.push_back({"gru.bz", &net.cell.bz});
  refs.push_back({"gru.br", &net.cell.br});
  refs.push_back({"gru.bh", &net.cell.bh});
  refs.push_back({"head.w", &net.head.w.a});
  refs.push_back({"head.b", &net.head.b});
  return refs;
}

double Gradients::l2_norm() const {
  double sq = 0.0;
  for (const auto& v : values)
    for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

void Gradients::scale(double s) {
  for (auto& v : values)
    for (double& x : v) x *= s;
}

Gradients zero_gradients(SequenceNet& net) {
  Gradients g;
  for (const auto& ref : tensor_refs(net)) {
    g.names.push_back(ref.name);
    g.values.emplace_back(ref.data->size(), 0.0);
  }
  return g;
}

namespace {

// Index of a named gradient slot; the enumeration order is fixed so a plain
// scan is fine at these sizes.
Vec& slot(Gradients& g, const std::string& name) {
  for (size_t i = 0; i < g.names.size(); ++i)
    if (g.names[i] == name) return g.values[i];
  throw ShapeError("no gradient slot named '" + name + "'");
}

}  // namespace

Gradients backward_sequence(const SequenceNet& net, const SeqCache& cache,
                            const std::vector<double>& labels) {
  const size_t T = cache.steps.size();
  if (T == 0) throw ShapeError("backward_sequence: empty cache");
  if (labels.size() != T)
    throw ShapeError("backward_sequence: " + std::to_string(T) +
                     " cached steps vs " + std::to_string(labels.size()) +
                     " labels");
  const int hid = net.hidden_dim();
  const int udim = net.recurrent_input_dim();
  for (const auto& s : cache.steps)
    if (static_cast<int>(s.h.size()) != hid ||
        static_cast<int>(s.u.size()) != udim)
      throw ShapeError("backward_sequence: stale cache (shapes do not match net)");

  // Mutable alias for tensor enumeration only; nothing is written through it.
  auto& net_mut = const_cast<SequenceNet&>(net);
  Gradients g = zero_gradients(net_mut);

  Vec& g_wz = slot(g, "gru.wz");
  Vec& g_wr = slot(g, "gru.wr");
  Vec& g_wh = slot(g, "gru.wh");
  Vec& g_uz = slot(g, "gru.uz");
  Vec& g_ur = slot(g, "gru.ur");
  Vec& g_uh = slot(g, "gru.uh");
  Vec& g_bz = slot(g, "gru.bz");
  Vec& g_br = slot(g, "gru.br");
  Vec& g_bh = slot(g, "gru.bh");
  Vec& g_hw = slot(g, "head.w");
  Vec& g_hb = slot(g, "head.b");

  auto outer_into = [&](Vec& acc, const Mat& shape, const Vec& dy, const Vec& x) {
    Mat view;
    view.rows = shape.rows;
    view.cols = shape.cols;
    view.a = std::move(acc);
    outer_acc(view, dy, x);
    acc = std::move(view.a);
  };

  const double inv_t = 1.0 / static_cast<double>(T);
  Vec dh(static_cast<size_t>(hid), 0.0);

  for (size_t step = T; step-- > 0;) {
    const StepCache& s = cache.steps[step];

    // Head: y = sigma(w h + b); dL/d(pre) = (y - l)/T for the BCE mean.
    double dpre = (s.y - labels[step]) * inv_t;
    for (int j = 0; j < hid; ++j) {
      g_hw[static_cast<size_t>(j)] += dpre * s.h[static_cast<size_t>(j)];
      dh[static_cast<size_t>(j)] += dpre * net.head.w(0, j);
    }
    g_hb[0] += dpre;

    // GRU backward, reset-inside-candidate:
    //   dz = dh . (c - h_prev),   da_z = dz . z(1-z)
    //   dc = dh . z,              da_c = dc . (1-c^2)
    //   s* = Uh^T da_c,  dr = s* . h_prev,  da_r = dr . r(1-r)
    //   dh_prev = dh.(1-z) + Uz^T da_z + Ur^T da_r + s* . r
    //   du = Wz^T da_z + Wr^T da_r + Wh^T da_c
    const GruGates& gt = s.gates;
    Vec da_z(static_cast<size_t>(hid));
    Vec da_c(static_cast<size_t>(hid));
    for (int j = 0; j < hid; ++j) {
      size_t k = static_cast<size_t>(j);
      double dz = dh[k] * (gt.c[k] - s.h_prev[k]);
      da_z[k] = dz * gt.z[k] * (1.0 - gt.z[k]);
      double dc = dh[k] * gt.z[k];
      da_c[k] = dc * (1.0 - gt.c[k] * gt.c[k]);
    }
    Vec sstar(static_cast<size_t>(hid), 0.0);
    matvec_t_acc(net.cell.uh, da_c, sstar);
    Vec da_r(static_cast<size_t>(hid));
    for (int j = 0; j < hid; ++j) {
      size_t k = static_cast<size_t>(j);
      double dr = sstar[k] * s.h_prev[k];
      da_r[k] = dr * gt.r[k] * (1.0 - gt.r[k]);
    }

    Vec dh_prev(static_cast<size_t>(hid));
    for (int j = 0; j < hid; ++j) {
      size_t k = static_cast<size_t>(j);
      dh_prev[k] = dh[k] * (1.0 - gt.z[k]) + sstar[k] * gt.r[k];
    }
    matvec_t_acc(net.cell.uz, da_z, dh_prev);
    matvec_t_acc(net.cell.ur, da_r, dh_prev);

    Vec rh(static_cast<size_t>(hid));
    for (int j = 0; j < hid; ++j) {
      size_t k = static_cast<size_t>(j);
      rh[k] = gt.r[k] * s.h_prev[k];
    }

    outer_into(g_wz, net.cell.wz, da_z, s.u);
    outer_into(g_wr, net.cell.wr, da_r, s.u);
    outer_into(g_wh, net.cell.wh, da_c, s.u);
    outer_into(g_uz, net.cell.uz, da_z, s.h_prev);
    outer_into(g_ur, net.cell.ur, da_r, s.h_prev);
    outer_into(g_uh, net.cell.uh, da_c, rh);
    for (int j = 0; j < hid; ++j) {
      size_t k = static_cast<size_t>(j);
      g_bz[k] += da_z[k];
      g_br[k] += da_r[k];
      g_bh[k] += da_c[k];
    }

    Vec du(static_cast<size_t>(udim), 0.0);
    matvec_t_acc(net.cell.wz, da_z, du);
    matvec_t_acc(net.cell.wr, da_r, du);
    matvec_t_acc(net.cell.wh, da_c, du);

    // Route du back through the encoders (segment by segment, in block
    // order; the passthrough tail has no parameters).
    int seg = 0;
    for (const auto& b : net.blocks) {
      int width = b.out_dim();
      if (b.encoded) {
        Vec d_out(du.begin() + seg, du.begin() + seg + width);
        // Encoder outputs occupy u[seg .. seg+width).
        Vec d_pre(static_cast<size_t>(width));
        for (int j = 0; j < width; ++j) {
          size_t k = static_cast<size_t>(j);
          double out = s.u[static_cast<size_t>(seg) + k];
          d_pre[k] = d_out[k] * act_deriv_from_out(b.enc.act, out);
        }
        Vec x(s.raw.begin() + b.offset, s.raw.begin() + b.offset + b.len);
        Vec& g_ew = slot(g, "enc." + b.name + ".w");
        Vec& g_eb = slot(g, "enc." + b.name + ".b");
        outer_into(g_ew, b.enc.w, d_pre, x);
        for (int j = 0; j < width; ++j)
          g_eb[static_cast<size_t>(j)] += d_pre[static_cast<size_t>(j)];
      }
      seg += width;
    }

    dh = std::move(dh_prev);
  }

  return g;
}

}  // namespace procdur::nn
