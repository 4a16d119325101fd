#include "procdur/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "procdur/errors.hpp"

namespace procdur::nn {

namespace {

double loss_at(SequenceNet& net, const std::vector<Vec>& inputs,
               const std::vector<double>& labels) {
  auto y = forward_sequence(net, inputs, nullptr);
  return bce_loss(y, labels);
}

}  // namespace

GradCheckReport compare_gradients(SequenceNet& net,
                                  const std::vector<Vec>& inputs,
                                  const std::vector<double>& labels,
                                  const Gradients& grads, double fd_step) {
  auto refs = tensor_refs(net);
  if (grads.values.size() != refs.size())
    throw ShapeError("compare_gradients: gradient tensor count mismatch");

  GradCheckReport report;
  for (size_t ti = 0; ti < refs.size(); ++ti) {
    Vec& p = *refs[ti].data;
    const Vec& ga = grads.values[ti];
    if (ga.size() != p.size())
      throw ShapeError("compare_gradients: gradient '" + grads.names[ti] +
                       "' has wrong size");
    GradCheckRow worst_here;
    worst_here.tensor = refs[ti].name;
    for (size_t j = 0; j < p.size(); ++j) {
      double keep = p[j];
      p[j] = keep + fd_step;
      double lp = loss_at(net, inputs, labels);
      p[j] = keep - fd_step;
      double lm = loss_at(net, inputs, labels);
      p[j] = keep;
      double num = (lp - lm) / (2.0 * fd_step);
      double ana = ga[j];
      double rel = std::fabs(ana - num) /
                   std::max({std::fabs(ana), std::fabs(num), 1e-4});
      ++report.params_checked;
      if (rel >= worst_here.rel) {
        worst_here.index = static_cast<int>(j);
        worst_here.analytic = ana;
        worst_here.numeric = num;
        worst_here.rel = rel;
      }
    }
    if (worst_here.rel >= report.max_rel) {
      report.max_rel = worst_here.rel;
      report.worst = worst_here;
    }
    report.per_tensor.push_back(worst_here);
  }
  return report;
}

GradCheckReport grad_check(SequenceNet& net, const std::vector<Vec>& inputs,
                           const std::vector<double>& labels, double fd_step) {
  SeqCache cache;
  auto y = forward_sequence(net, inputs, &cache);
  (void)bce_loss(y, labels);
  Gradients grads = backward_sequence(net, cache, labels);
  return compare_gradients(net, inputs, labels, grads, fd_step);
}

std::string format_gradcheck(const GradCheckReport& report, double tolerance) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %8s %14s %14s %10s\n", "tensor",
                "index", "analytic", "numeric", "rel");
  out += line;
  for (const auto& row : report.per_tensor) {
    std::snprintf(line, sizeof(line), "%-16s %8d %14.6e %14.6e %10.3e\n",
                  row.tensor.c_str(), row.index, row.analytic, row.numeric,
                  row.rel);
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "checked %lld parameters; max rel %.3e (tolerance %.1e): %s\n",
                static_cast<long long>(report.params_checked), report.max_rel,
                tolerance, report.max_rel < tolerance ? "OK" : "FAIL");
  out += line;
  return out;
}

}  // namespace procdur::nn
