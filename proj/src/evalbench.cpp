#include "procdur/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "procdur/errors.hpp"
#include "procdur/types.hpp"

namespace procdur {

ProcMeta meta_of(const ProcedureRecord& record) {
  return ProcMeta{record.id, record.ptype, record.duration_n()};
}

FoldSplit make_folds(const std::vector<ProcMeta>& dataset, int seed) {
  if (dataset.empty()) throw DataError("make_folds: empty dataset");
  std::map<int, std::vector<std::string>> by_type;
  for (const auto& m : dataset) {
    if (!valid_ptype(m.ptype))
      throw DataError("make_folds: record '" + m.id + "' has invalid type");
    by_type[m.ptype].push_back(m.id);
  }
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  FoldSplit split;
  size_t cursor = 0;
  for (auto& [t, ids] : by_type) {
    std::sort(ids.begin(), ids.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    for (auto& id : ids) {
      split.folds[cursor % 4].push_back(std::move(id));
      ++cursor;
    }
  }
  return split;
}

double BaselinePredictor::predict(int ptype) const {
  if (kind == BaselineKind::kNaive) return global_mean;
  auto it = type_mean.find(ptype);
  return it == type_mean.end() ? global_mean : it->second;
}

BaselinePredictor fit_baseline(const std::vector<ProcMeta>& train,
                               BaselineKind kind) {
  if (train.empty()) throw DataError("fit_baseline: empty training set");
  BaselinePredictor pred;
  pred.kind = kind;
  double sum = 0.0;
  std::map<int, std::pair<double, int>> acc;
  for (const auto& m : train) {
    sum += m.n;
    auto& [s, c] = acc[m.ptype];
    s += m.n;
    c += 1;
  }
  pred.global_mean = sum / static_cast<double>(train.size());
  if (kind == BaselineKind::kPerType)
    for (const auto& [t, sc] : acc)
      pred.type_mean[t] = sc.first / static_cast<double>(sc.second);
  return pred;
}

FrameErrors errors_from_nhat(const std::vector<double>& n_hat, int n) {
  if (n < 1) throw DataError("errors_from_nhat: n must be >= 1");
  if (static_cast<int>(n_hat.size()) != n)
    throw DataError("errors_from_nhat: " + std::to_string(n_hat.size()) +
                    " predictions for an " + std::to_string(n) +
                    "-frame procedure");
  FrameErrors e;
  e.n = n;
  e.abs.reserve(n_hat.size());
  e.rel.reserve(n_hat.size());
  for (double v : n_hat) {
    double a = std::fabs(v - static_cast<double>(n));
    e.abs.push_back(a);
    e.rel.push_back(a / static_cast<double>(n));
  }
  return e;
}

FrameErrors errors_for_procedure(const std::vector<PredictionPoint>& points,
                                 int n) {
  std::vector<double> n_hat;
  n_hat.reserve(points.size());
  for (size_t k = 0; k < points.size(); ++k) {
    if (points[k].i != static_cast<int>(k) + 1)
      throw DataError("errors_for_procedure: predictions must cover i=1..N in order");
    n_hat.push_back(points[k].n_hat);
  }
  return errors_from_nhat(n_hat, n);
}

Stat stat_of(const std::vector<double>& values) {
  Stat s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
  return s;
}

ProcErrorSummary summarize_procedure(const FrameErrors& errors) {
  const int n = errors.n;
  if (n < 1 || static_cast<int>(errors.abs.size()) != n ||
      static_cast<int>(errors.rel.size()) != n)
    throw DataError("summarize_procedure: inconsistent error sequence");
  ProcErrorSummary s;
  std::array<double, 4> q_abs_sum{};
  std::array<double, 4> q_rel_sum{};
  std::array<int, 4> q_count{};
  double abs_sum = 0.0;
  double rel_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    int q = static_cast<int>((4LL * i + n - 1) / n);  // ceil(4i/n)
    q = std::clamp(q, 1, 4);
    q_abs_sum[static_cast<size_t>(q - 1)] += errors.abs[static_cast<size_t>(i - 1)];
    q_rel_sum[static_cast<size_t>(q - 1)] += errors.rel[static_cast<size_t>(i - 1)];
    q_count[static_cast<size_t>(q - 1)] += 1;
    abs_sum += errors.abs[static_cast<size_t>(i - 1)];
    rel_sum += errors.rel[static_cast<size_t>(i - 1)];
  }
  for (int q = 0; q < 4; ++q) {
    if (q_count[static_cast<size_t>(q)] > 0) {
      s.has_q[static_cast<size_t>(q)] = true;
      s.q_abs[static_cast<size_t>(q)] =
          q_abs_sum[static_cast<size_t>(q)] / q_count[static_cast<size_t>(q)];
      s.q_rel[static_cast<size_t>(q)] =
          q_rel_sum[static_cast<size_t>(q)] / q_count[static_cast<size_t>(q)];
    }
  }
  s.overall_abs = abs_sum / n;
  s.overall_rel = rel_sum / n;
  const int half = (n + 1) / 2;  // ceil(n/2)
  s.halftime_abs = errors.abs[static_cast<size_t>(half - 1)];
  s.halftime_rel = errors.rel[static_cast<size_t>(half - 1)];
  return s;
}

StatBlock quartile_report(const std::vector<ProcErrorSummary>& summaries) {
  if (summaries.empty()) throw DataError("quartile_report: no procedures");
  StatBlock block;
  for (int q = 0; q < 4; ++q) {
    std::vector<double> abs_vals;
    std::vector<double> rel_vals;
    for (const auto& s : summaries) {
      if (!s.has_q[static_cast<size_t>(q)]) continue;
      abs_vals.push_back(s.q_abs[static_cast<size_t>(q)]);
      rel_vals.push_back(s.q_rel[static_cast<size_t>(q)]);
    }
    block.q_abs[static_cast<size_t>(q)] = stat_of(abs_vals);
    block.q_rel[static_cast<size_t>(q)] = stat_of(rel_vals);
  }
  std::vector<double> vals;
  vals.reserve(summaries.size());
  auto collect = [&](auto getter) {
    vals.clear();
    for (const auto& s : summaries) vals.push_back(getter(s));
    return stat_of(vals);
  };
  block.overall_abs = collect([](const ProcErrorSummary& s) { return s.overall_abs; });
  block.overall_rel = collect([](const ProcErrorSummary& s) { return s.overall_rel; });
  block.halftime_abs = collect([](const ProcErrorSummary& s) { return s.halftime_abs; });
  block.halftime_rel = collect([](const ProcErrorSummary& s) { return s.halftime_rel; });
  return block;
}

EvalMethod make_variant_method(const FusionConfig& config) {
  config.validate();
  EvalMethod method;
  method.name = config.variant_name();
  method.fit = [config](const std::vector<const ProcedureRecord*>& train,
                        int fold_index) -> MethodFn {
    FusionConfig fold_config = config;
    fold_config.seed = config.seed + 7919 * fold_index;
    std::vector<ProcedureRecord> records;
    records.reserve(train.size());
    for (const auto* r : train) records.push_back(*r);
    TrainResult result = procdur::train(records, fold_config);
    auto model = std::make_shared<Model>(std::move(result.model));
    return [model](const ProcedureRecord& rec) {
      auto points = predict_record(*model, rec);
      std::vector<double> n_hat;
      n_hat.reserve(points.size());
      for (const auto& p : points) n_hat.push_back(p.n_hat);
      return n_hat;
    };
  };
  return method;
}

EvalReport run_eval(const std::vector<ProcedureRecord>& dataset,
                    const std::vector<EvalMethod>& methods,
                    const EvalOptions& options) {
  if (dataset.size() < 2) throw DataError("run_eval: need at least 2 procedures");
  std::map<std::string, const ProcedureRecord*> by_id;
  std::vector<ProcMeta> metas;
  for (const auto& rec : dataset) {
    if (!by_id.emplace(rec.id, &rec).second)
      throw DataError("run_eval: duplicate procedure id '" + rec.id + "'");
    metas.push_back(meta_of(rec));
  }
  FoldSplit split = make_folds(metas, options.seed);

  EvalReport report;
  report.seed = options.seed;
  report.n_procedures = static_cast<int>(dataset.size());

  std::vector<MethodReport> rows;
  if (options.include_baselines) {
    rows.push_back({"naive", {}, {}, {}, {}, {}, {}});
    rows.push_back({"per-type", {}, {}, {}, {}, {}, {}});
  }
  for (const auto& m : methods) rows.push_back({m.name, {}, {}, {}, {}, {}, {}});

  for (int fold = 0; fold < 4; ++fold) {
    const auto& test_ids = split.folds[static_cast<size_t>(fold)];
    if (test_ids.empty()) continue;
    std::set<std::string> held(test_ids.begin(), test_ids.end());
    std::vector<const ProcedureRecord*> train_recs;
    std::vector<ProcMeta> train_metas;
    for (const auto& rec : dataset) {
      if (held.count(rec.id)) continue;
      train_recs.push_back(&rec);
      train_metas.push_back(meta_of(rec));
    }
    if (train_recs.empty())
      throw DataError("run_eval: fold " + std::to_string(fold) +
                      " leaves an empty training set");

    std::vector<MethodFn> fns;
    size_t row = 0;
    if (options.include_baselines) {
      BaselinePredictor naive = fit_baseline(train_metas, BaselineKind::kNaive);
      BaselinePredictor typed = fit_baseline(train_metas, BaselineKind::kPerType);
      fns.push_back([naive](const ProcedureRecord& rec) {
        return std::vector<double>(static_cast<size_t>(rec.duration_n()),
                                   naive.predict(rec.ptype));
      });
      fns.push_back([typed](const ProcedureRecord& rec) {
        return std::vector<double>(static_cast<size_t>(rec.duration_n()),
                                   typed.predict(rec.ptype));
      });
      row = 2;
    }
    for (const auto& m : methods) {
      (void)row;
      fns.push_back(m.fit(train_recs, fold));
    }

    for (const auto& id : test_ids) {
      const ProcedureRecord& rec = *by_id.at(id);
      for (size_t k = 0; k < fns.size(); ++k) {
        std::vector<double> n_hat = fns[k](rec);
        FrameErrors errors = errors_from_nhat(n_hat, rec.duration_n());
        rows[k].proc_ids.push_back(rec.id);
        rows[k].proc_fold.push_back(fold);
        rows[k].proc_ptype.push_back(rec.ptype);
        rows[k].proc_errors.push_back(std::move(errors));
      }
    }
  }

  for (auto& r : rows) {
    std::vector<ProcErrorSummary> all;
    std::map<int, std::vector<ProcErrorSummary>> typed;
    for (size_t k = 0; k < r.proc_errors.size(); ++k) {
      ProcErrorSummary s = summarize_procedure(r.proc_errors[k]);
      all.push_back(s);
      typed[r.proc_ptype[k]].push_back(s);
    }
    r.stats = quartile_report(all);
    if (options.per_type_breakdown)
      for (const auto& [t, list] : typed) r.per_type[t] = quartile_report(list);
  }

  report.methods = std::move(rows);
  return report;
}

namespace {

std::string cell_abs(const Stat& s) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.0f±%.0f", s.mean, s.stddev);
  return buf;
}

std::string cell_rel(const Stat& s) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.1f±%.1f", 100.0 * s.mean, 100.0 * s.stddev);
  return buf;
}

void render_block_table(std::string& out, const std::string& title,
                        const std::vector<std::pair<std::string, const StatBlock*>>& rows,
                        bool relative) {
  out += title + "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "  %-12s %14s %14s %14s %14s %14s %14s\n",
                "method", "Q1", "Q2", "Q3", "Q4", "mean", "halftime");
  out += line;
  for (const auto& [name, block] : rows) {
    auto cell = [&](const Stat& s) { return relative ? cell_rel(s) : cell_abs(s); };
    std::snprintf(line, sizeof(line), "  %-12s %14s %14s %14s %14s %14s %14s\n",
                  name.c_str(),
                  cell(relative ? block->q_rel[0] : block->q_abs[0]).c_str(),
                  cell(relative ? block->q_rel[1] : block->q_abs[1]).c_str(),
                  cell(relative ? block->q_rel[2] : block->q_abs[2]).c_str(),
                  cell(relative ? block->q_rel[3] : block->q_abs[3]).c_str(),
                  cell(relative ? block->overall_rel : block->overall_abs).c_str(),
                  cell(relative ? block->halftime_rel : block->halftime_abs).c_str());
    out += line;
  }
}

}  // namespace

std::string render_text_report(const EvalReport& report) {
  std::string out;
  out += "duration prediction report\n";
  out += "  procedures: " + std::to_string(report.n_procedures) +
         ", folds: 4 (leave-one-fold-out), split seed: " +
         std::to_string(report.seed) + "\n";
  out += "  conventions: frame i of N is in quartile ceil(4i/N); halftime is\n";
  out += "  frame ceil(N/2); cells are mean±std across procedures of the\n";
  out += "  per-procedure means (population std).\n\n";

  std::vector<std::pair<std::string, const StatBlock*>> rows;
  for (const auto& m : report.methods) rows.push_back({m.name, &m.stats});
  render_block_table(out, "absolute error (s)", rows, false);
  out += "\n";
  render_block_table(out, "relative error (% of duration)", rows, true);

  std::set<int> types;
  for (const auto& m : report.methods)
    for (const auto& [t, block] : m.per_type) types.insert(t);
  for (int t : types) {
    out += "\n";
    std::vector<std::pair<std::string, const StatBlock*>> trows;
    for (const auto& m : report.methods) {
      auto it = m.per_type.find(t);
      if (it != m.per_type.end()) trows.push_back({m.name, &it->second});
    }
    std::string label;
    for (const auto& pt : procedure_types())
      if (pt.id == t) label = pt.label;
    render_block_table(out, "type " + std::to_string(t) + " (" + label +
                                "), relative error (%)",
                       trows, true);
  }
  return out;
}

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = "procdur-eval-report";
  j["seed"] = report.seed;
  j["n_procedures"] = report.n_procedures;
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& m : report.methods) {
    nlohmann::json jm;
    jm["name"] = m.name;
    auto stat_json = [](const Stat& s) {
      return nlohmann::json{{"mean", s.mean}, {"std", s.stddev}, {"count", s.count}};
    };
    auto block_json = [&](const StatBlock& b) {
      nlohmann::json jb;
      for (int q = 0; q < 4; ++q) {
        jb["q" + std::to_string(q + 1)] = {
            {"abs", stat_json(b.q_abs[static_cast<size_t>(q)])},
            {"rel", stat_json(b.q_rel[static_cast<size_t>(q)])}};
      }
      jb["mean"] = {{"abs", stat_json(b.overall_abs)},
                    {"rel", stat_json(b.overall_rel)}};
      jb["halftime"] = {{"abs", stat_json(b.halftime_abs)},
                        {"rel", stat_json(b.halftime_rel)}};
      return jb;
    };
    jm["stats"] = block_json(m.stats);
    nlohmann::json per_type = nlohmann::json::object();
    for (const auto& [t, block] : m.per_type)
      per_type[std::to_string(t)] = block_json(block);
    jm["per_type"] = std::move(per_type);
    nlohmann::json procs = nlohmann::json::array();
    for (size_t k = 0; k < m.proc_ids.size(); ++k) {
      nlohmann::json p;
      p["id"] = m.proc_ids[k];
      p["fold"] = m.proc_fold[k];
      p["ptype"] = m.proc_ptype[k];
      p["n"] = m.proc_errors[k].n;
      p["abs"] = m.proc_errors[k].abs;
      p["rel"] = m.proc_errors[k].rel;
      procs.push_back(std::move(p));
    }
    jm["procedures"] = std::move(procs);
    methods.push_back(std::move(jm));
  }
  j["methods"] = std::move(methods);
  return j;
}

}  // namespace procdur
