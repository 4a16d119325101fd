#pragma once

#include <string>
#include <vector>

#include "procdur/nn/dense.hpp"
#include "procdur/nn/gru.hpp"

namespace procdur::nn {

// One modality's slice of the raw per-step input vector. Encoded blocks run
// a dense layer; unencoded blocks pass their slice through untouched (no
// parameters).
struct InputBlock {
  std::string name;
  int offset = 0;
  int len = 0;
  bool encoded = true;
  DenseLayer enc;

  int out_dim() const { return encoded ? enc.out() : len; }
};

// Sequence regressor: per step, the raw input is split into modality blocks
// (each optionally encoded), a trailing passthrough segment is appended
// unchanged, the concatenation feeds the recurrent cell, and a single-output
// sigmoid head reads the state.
struct SequenceNet {
  std::vector<InputBlock> blocks;
  int passthrough = 0;
  GruCell cell;
  DenseLayer head;  // 1 x hidden, sigmoid

  int input_dim() const;            // width of the raw per-step vector
  int recurrent_input_dim() const;  // width of the cell input
  int hidden_dim() const { return cell.hidden(); }
};

// Builds the cell input from one raw input vector. Streaming and batch
// paths both run through here, which is what makes their outputs
// bit-identical.
Vec assemble_recurrent_input(const SequenceNet& net, const Vec& raw);

// One step of the full network; advances `h` in place and returns the head
// output. `cache` (optional) retains what the backward pass needs.
struct StepCache {
  Vec raw;
  Vec u;  // assembled cell input (encoder outputs live in their segments)
  Vec h_prev;
  GruGates gates;
  Vec h;
  double y = 0.0;
};
double net_step(const SequenceNet& net, const Vec& raw, Vec& h, StepCache* cache);

struct SeqCache {
  std::vector<StepCache> steps;
};

// Runs the whole sequence from the zero state; returns one output per step,
// each strictly inside (0,1). Throws TrainError naming the step if an
// intermediate goes non-finite.
std::vector<double> forward_sequence(const SequenceNet& net,
                                     const std::vector<Vec>& inputs,
                                     SeqCache* cache = nullptr);

// Mean over steps of -[l ln y + (1-l) ln(1-y)].
double bce_loss(const std::vector<double>& y, const std::vector<double>& labels);

// Flat per-tensor parameter view; order is fixed (blocks in declaration
// order, then cell, then head) and shared by the optimizer, the checkpoint
// writer and the gradient checker.
struct TensorRef {
  std::string name;
  Vec* data;
};
std::vector<TensorRef> tensor_refs(SequenceNet& net);

struct Gradients {
  std::vector<std::string> names;
  std::vector<Vec> values;  // parallel to tensor_refs(net)

  double l2_norm() const;
  void scale(double s);
};
Gradients zero_gradients(SequenceNet& net);

// Exact gradient of bce_loss(forward_sequence(net, inputs), labels) with
// respect to every parameter, by backpropagation through time over the
// cached intermediates. The cache must come from a matching
// forward_sequence call on the same net.
Gradients backward_sequence(const SequenceNet& net, const SeqCache& cache,
                            const std::vector<double>& labels);

}  // namespace procdur::nn
