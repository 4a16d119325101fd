#pragma once

#include <string>
#include <vector>

#include "procdur/nn/net.hpp"

namespace procdur::nn {

// Per-tensor worst disagreement between analytic and finite-difference
// gradients.
struct GradCheckRow {
  std::string tensor;
  int index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel = 0.0;
};

struct GradCheckReport {
  double max_rel = 0.0;
  GradCheckRow worst;
  std::vector<GradCheckRow> per_tensor;  // one row per tensor
  std::int64_t params_checked = 0;
};

// Compares an externally supplied gradient against central differences of
// the BCE loss, perturbing every parameter by +-fd_step. Relative error is
// |a - n| / max(|a|, |n|, 1e-4).
GradCheckReport compare_gradients(SequenceNet& net,
                                  const std::vector<Vec>& inputs,
                                  const std::vector<double>& labels,
                                  const Gradients& grads, double fd_step);

// Full check: runs forward + backward itself, then compares (fd_step 1e-5).
GradCheckReport grad_check(SequenceNet& net, const std::vector<Vec>& inputs,
                           const std::vector<double>& labels,
                           double fd_step = 1e-5);

// Plain-text table, one line per tensor plus a verdict line.
std::string format_gradcheck(const GradCheckReport& report, double tolerance);

}  // namespace procdur::nn
