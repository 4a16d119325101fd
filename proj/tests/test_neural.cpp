#include <doctest.h>

#include <cmath>
#include <random>

#include "procdur/errors.hpp"
#include "procdur/nn/adam.hpp"
#include "procdur/nn/dense.hpp"
#include "procdur/nn/gradcheck.hpp"
#include "procdur/nn/gru.hpp"
#include "procdur/nn/linalg.hpp"
#include "procdur/nn/net.hpp"

using namespace procdur;
using namespace procdur::nn;

namespace {

// Small net with all the moving parts: two encoded blocks + passthrough.
SequenceNet tiny_net(int seed, bool with_blocks = true) {
  SequenceNet net;
  int offset = 0;
  if (with_blocks) {
    InputBlock a;
    a.name = "a";
    a.offset = 0;
    a.len = 3;
    a.enc = DenseLayer(2, 3, Act::kTanh);
    net.blocks.push_back(std::move(a));
    offset += 3;
    InputBlock b;
    b.name = "b";
    b.offset = offset;
    b.len = 2;
    b.enc = DenseLayer(2, 2, Act::kSigmoid);
    net.blocks.push_back(std::move(b));
  }
  net.passthrough = 2;
  net.cell = GruCell(4, net.recurrent_input_dim());
  net.head = DenseLayer(1, 4, Act::kSigmoid);

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_real_distribution<double> dist(-0.6, 0.6);
  for (const auto& ref : tensor_refs(net))
    for (double& v : *ref.data) v = dist(rng);
  return net;
}

std::vector<Vec> random_inputs(const SequenceNet& net, int steps, int seed) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<Vec> inputs;
  for (int t = 0; t < steps; ++t) {
    Vec x(static_cast<size_t>(net.input_dim()));
    for (double& v : x) v = dist(rng);
    inputs.push_back(std::move(x));
  }
  return inputs;
}

std::vector<double> ramp_labels(int steps) {
  std::vector<double> labels;
  for (int i = 1; i <= steps; ++i)
    labels.push_back(static_cast<double>(i) / steps);
  return labels;
}

}  // namespace

TEST_CASE("matvec and friends compute the expected values") {
  Mat m(2, 3);
  m(0, 0) = 1; m(0, 1) = 2; m(0, 2) = 3;
  m(1, 0) = -1; m(1, 1) = 0; m(1, 2) = 1;
  Vec x{1, 2, 3};
  Vec out(2, 0.0);
  matvec(m, x, out);
  CHECK(out == Vec{14, 2});

  Vec acc{1, 1, 1};
  Vec y{2, -1};
  matvec_t_acc(m, y, acc);  // acc += M^T y
  CHECK(acc == Vec{1 + 2 + 1, 1 + 4, 1 + 6 - 1});

  Mat o(2, 3);
  outer_acc(o, y, x);
  CHECK(o(0, 0) == 2);
  CHECK(o(0, 2) == 6);
  CHECK(o(1, 1) == -2);

  Vec bad(2, 0.0);
  CHECK_THROWS_AS(matvec(m, Vec{1, 2}, bad), ShapeError);
}

TEST_CASE("dense layer applies weights, bias and activation") {
  DenseLayer layer(2, 2, Act::kTanh);
  layer.w(0, 0) = 0.5; layer.w(0, 1) = -0.25;
  layer.w(1, 0) = 0.1; layer.w(1, 1) = 0.3;
  layer.b = {0.05, -0.1};
  Vec out = dense_forward(layer, {0.4, 0.8});
  CHECK(out[0] == doctest::Approx(0.04995837495787998).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.17808086811733023).epsilon(1e-14));
}

TEST_CASE("recurrent cell step matches the frozen scalar oracle") {
  // 1x1 cell, all parameters pinned; expected values computed once by an
  // independent evaluation of the update equations and frozen here.
  GruCell cell(1, 1);
  cell.wz(0, 0) = 0.5; cell.uz(0, 0) = -0.3; cell.bz[0] = 0.1;
  cell.wr(0, 0) = 0.2; cell.ur(0, 0) = 0.4;  cell.br[0] = -0.2;
  cell.wh(0, 0) = 0.7; cell.uh(0, 0) = 0.6;  cell.bh[0] = 0.05;
  GruGates gates;
  Vec h = gru_step(cell, Vec{0.3}, Vec{0.8}, &gates);
  CHECK(gates.z[0] == doctest::Approx(0.6010878788483698).epsilon(1e-14));
  CHECK(gates.r[0] == doctest::Approx(0.5199893401555818).epsilon(1e-14));
  CHECK(gates.c[0] == doctest::Approx(0.6066466563168188).epsilon(1e-14));
  CHECK(h[0] == doctest::Approx(0.4843215882014216).epsilon(1e-14));
}

TEST_CASE("sequence forward equals manual step composition") {
  SequenceNet net = tiny_net(21);
  auto inputs = random_inputs(net, 5, 31);
  auto ys = forward_sequence(net, inputs);
  REQUIRE(ys.size() == 5);

  Vec h(static_cast<size_t>(net.hidden_dim()), 0.0);
  for (size_t t = 0; t < inputs.size(); ++t) {
    Vec u = assemble_recurrent_input(net, inputs[t]);
    h = gru_step(net.cell, h, u, nullptr);
    Vec out = dense_forward(net.head, h);
    CHECK(ys[t] == out[0]);
  }
}

TEST_CASE("cross-entropy loss oracle") {
  CHECK(bce_loss({0.5, 0.5}, {1.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS((void)bce_loss({0.5}, {0.5, 0.5}), ShapeError);
}

TEST_CASE("analytic gradients match finite differences") {
  SUBCASE("blocks and passthrough") {
    SequenceNet net = tiny_net(7);
    auto inputs = random_inputs(net, 6, 17);
    auto report = grad_check(net, inputs, ramp_labels(6));
    INFO("worst ", report.worst.tensor, "[", report.worst.index, "] analytic ",
         report.worst.analytic, " numeric ", report.worst.numeric);
    CHECK(report.max_rel < 1e-4);
  }
  SUBCASE("passthrough only") {
    SequenceNet net = tiny_net(8, false);
    auto inputs = random_inputs(net, 9, 18);
    auto report = grad_check(net, inputs, ramp_labels(9));
    CHECK(report.max_rel < 1e-4);
  }
  SUBCASE("single step") {
    SequenceNet net = tiny_net(9);
    auto inputs = random_inputs(net, 1, 19);
    auto report = grad_check(net, inputs, {1.0});
    CHECK(report.max_rel < 1e-4);
  }
}

TEST_CASE("the checker flags a wrong gradient (fault injection)") {
  SequenceNet net = tiny_net(11);
  auto inputs = random_inputs(net, 4, 12);
  auto labels = ramp_labels(4);
  SeqCache cache;
  (void)forward_sequence(net, inputs, &cache);
  Gradients grads = backward_sequence(net, cache, labels);
  grads.values[2][0] += 0.5;  // corrupt one entry
  auto report = compare_gradients(net, inputs, labels, grads, 1e-5);
  CHECK(report.max_rel > 1e-2);
}

TEST_CASE("backward pass rejects a stale cache") {
  SequenceNet net = tiny_net(13);
  auto inputs = random_inputs(net, 3, 14);
  SeqCache cache;
  (void)forward_sequence(net, inputs, &cache);
  SequenceNet other = tiny_net(13);
  other.cell = GruCell(5, other.recurrent_input_dim());
  CHECK_THROWS_AS((void)backward_sequence(other, cache, ramp_labels(3)),
                  ShapeError);
  CHECK_THROWS_AS((void)backward_sequence(net, cache, ramp_labels(4)),
                  ShapeError);
}

TEST_CASE("one optimizer step matches the closed form") {
  SequenceNet net;
  net.passthrough = 1;
  net.cell = GruCell(1, 1);
  net.head = DenseLayer(1, 1, Act::kSigmoid);
  AdamParams hp;
  hp.lr = 0.1;
  AdamState state;
  state.init(net, hp);

  Gradients grads = zero_gradients(net);
  // head.w is the second-to-last tensor; set its gradient to 0.5.
  REQUIRE(grads.names[grads.names.size() - 2] == "head.w");
  grads.values[grads.names.size() - 2][0] = 0.5;
  net.head.w(0, 0) = 1.0;

  adam_step(net, grads, state);
  // At t=1 the bias corrections cancel: step = lr * g / (|g| + eps).
  double expect = 1.0 - 0.1 * 0.5 / (0.5 + 1e-8);
  CHECK(net.head.w(0, 0) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(state.t == 1);

  // Zero gradient leaves a parameter untouched.
  double bz_before = net.cell.bz[0];
  Gradients zeros = zero_gradients(net);
  adam_step(net, zeros, state);
  CHECK(net.cell.bz[0] == bz_before);
}

TEST_CASE("gradient container norm and scaling") {
  SequenceNet net = tiny_net(15);
  Gradients g = zero_gradients(net);
  g.values[0][0] = 3.0;
  g.values[1][0] = 4.0;
  CHECK(g.l2_norm() == doctest::Approx(5.0).epsilon(1e-15));
  g.scale(0.5);
  CHECK(g.values[0][0] == 1.5);
  CHECK(g.l2_norm() == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("tensor enumeration is stable and complete") {
  SequenceNet net = tiny_net(16);
  auto refs = tensor_refs(net);
  REQUIRE(refs.size() == 2 * 2 + 9 + 2);
  CHECK(refs[0].name == "enc.a.w");
  CHECK(refs[1].name == "enc.a.b");
  CHECK(refs[2].name == "enc.b.w");
  CHECK(refs[4].name == "gru.wz");
  CHECK(refs[12].name == "gru.bh");
  CHECK(refs[13].name == "head.w");
  CHECK(refs[14].name == "head.b");
}
