#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "procdur/estimator.hpp"
#include "procdur/record.hpp"

namespace procdur {

// Lightweight view of a procedure for splitting and baselines.
struct ProcMeta {
  std::string id;
  int ptype = 0;
  int n = 0;
};

ProcMeta meta_of(const ProcedureRecord& record);

// Four disjoint id sets covering the dataset; sizes differ by at most 1,
// and per type the fold counts differ by at most 1.
struct FoldSplit {
  std::array<std::vector<std::string>, 4> folds;
};

// Shuffles within each type (seeded), then deals round-robin with a cursor
// that runs on across types; that single cursor yields both balance
// properties at once.
FoldSplit make_folds(const std::vector<ProcMeta>& dataset, int seed);

enum class BaselineKind { kNaive, kPerType };

// Constant-duration predictors fitted on training folds only. A type
// unseen in training falls back to the global mean.
struct BaselinePredictor {
  BaselineKind kind = BaselineKind::kNaive;
  double global_mean = 0.0;
  std::map<int, double> type_mean;

  double predict(int ptype) const;
};

BaselinePredictor fit_baseline(const std::vector<ProcMeta>& train,
                               BaselineKind kind);

// Per-frame errors of one procedure: abs_i = |n_hat_i - N|, rel_i = abs_i/N.
struct FrameErrors {
  int n = 0;
  std::vector<double> abs;
  std::vector<double> rel;
};

FrameErrors errors_from_nhat(const std::vector<double>& n_hat, int n);
FrameErrors errors_for_procedure(const std::vector<PredictionPoint>& points,
                                 int n);

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // population
  int count = 0;
};

Stat stat_of(const std::vector<double>& values);

// Per-procedure summary: quartile q covers frames with ceil(4i/N) == q
// (so quartiles can be empty only when N < 4); halftime is the error at
// frame ceil(N/2).
struct ProcErrorSummary {
  std::array<double, 4> q_abs{};
  std::array<double, 4> q_rel{};
  std::array<bool, 4> has_q{};
  double overall_abs = 0.0;
  double overall_rel = 0.0;
  double halftime_abs = 0.0;
  double halftime_rel = 0.0;
};

ProcErrorSummary summarize_procedure(const FrameErrors& errors);

// Mean +- population std across procedures of the per-procedure summary
// values (procedures missing a quartile are left out of that quartile's
// statistic only).
struct StatBlock {
  std::array<Stat, 4> q_abs;
  std::array<Stat, 4> q_rel;
  Stat overall_abs;
  Stat overall_rel;
  Stat halftime_abs;
  Stat halftime_rel;
};

StatBlock quartile_report(const std::vector<ProcErrorSummary>& summaries);

// A fitted predictor: per-frame predicted total duration for one record.
using MethodFn = std::function<std::vector<double>(const ProcedureRecord&)>;

// A method under evaluation: fit() builds a predictor from one fold's
// training records (fold_index available for seed derivation).
struct EvalMethod {
  std::string name;
  std::function<MethodFn(const std::vector<const ProcedureRecord*>&, int)> fit;
};

// Cross-validated fusion variant as an EvalMethod: per fold, trains with
// seed config.seed + 7919 * fold_index.
EvalMethod make_variant_method(const FusionConfig& config);

struct MethodReport {
  std::string name;
  StatBlock stats;
  std::map<int, StatBlock> per_type;
  std::vector<std::string> proc_ids;   // evaluation order
  std::vector<int> proc_fold;          // fold each procedure was held out in
  std::vector<int> proc_ptype;
  std::vector<FrameErrors> proc_errors;
};

struct EvalReport {
  int seed = 0;
  int n_procedures = 0;
  std::vector<MethodReport> methods;  // baselines first, then methods
};

struct EvalOptions {
  int seed = 0;
  bool include_baselines = true;
  bool per_type_breakdown = true;
};

// Leave-one-fold-out protocol: for each fold, fit every method on the
// other three and score the held-out procedures. Needs at least 2
// procedures; empty folds are skipped.
EvalReport run_eval(const std::vector<ProcedureRecord>& dataset,
                    const std::vector<EvalMethod>& methods,
                    const EvalOptions& options);

// Aligned plain-text tables (absolute seconds and relative percent); the
// header states the aggregation conventions.
std::string render_text_report(const EvalReport& report);

// Machine-readable form with the raw per-frame errors of every procedure.
nlohmann::json report_json(const EvalReport& report);

}  // namespace procdur
