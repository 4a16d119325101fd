#pragma once

#include <map>
#include <string>
#include <vector>

#include "procdur/record.hpp"

namespace procdur {

// Generation recipe. Defaults give a five-type mix matching the reference
// cohort proportions with mean durations rescaled so the overall mean is
// 600 s, which keeps a full four-fold experiment at desk scale.
struct SynthSpec {
  int n_procedures = 120;
  std::map<int, double> type_mix;        // ptype -> proportion (sums to 1)
  int phases_per_type = 6;
  std::map<int, double> mean_duration;   // ptype -> seconds (>= 60)
  double duration_cv = 0.3;
  double info_image = 1.0;               // each in [0,1]
  double info_tools = 1.0;
  double info_device = 1.0;
  double noise_sigma = 0.05;
  int d_img = 64;
  int seed = 7;

  SynthSpec();
  void validate() const;  // throws ConfigError
};

// Hidden per-procedure ground truth kept aside for diagnostics:
// boundaries[p] is the first frame (1-based) of phase p.
struct PhaseTrace {
  std::string id;
  int ptype = 0;
  int n = 0;
  std::vector<int> boundaries;
};

struct GenResult {
  std::vector<ProcedureRecord> records;
  std::vector<PhaseTrace> traces;  // parallel to records
};

// Deterministic in spec.seed; procedures use independent derived streams,
// so output is also independent of generation order.
GenResult generate(const SynthSpec& spec);

struct OracleView {
  std::vector<double> progress;  // i/N per frame
  std::vector<int> phases;       // hidden phase id per frame, 0-based
};

// Requires the trace written for this exact record; anything else is a
// foreign record (DataError).
OracleView oracle_progress(const ProcedureRecord& record,
                           const PhaseTrace& trace);

// Sidecar trace file (one JSON document for the whole dataset).
void save_traces(const std::vector<PhaseTrace>& traces, const std::string& path);
std::vector<PhaseTrace> load_traces(const std::string& path);

// Reads a SynthSpec from a JSON file; missing keys keep their defaults,
// unknown keys are rejected.
SynthSpec load_synth_spec(const std::string& path);

}  // namespace procdur
