#pragma once

#include <vector>

#include "procdur/fusion.hpp"
#include "procdur/nn/adam.hpp"
#include "procdur/nn/gradcheck.hpp"
#include "procdur/record.hpp"

namespace procdur {

// l_i = i/N for frame i of an N-second procedure; lies in (0, 1].
double progress_label(int i, int n);

struct PredictionPoint {
  int i = 0;
  double y = 0.0;
  double n_hat = 0.0;
  double remaining = 0.0;
};

// n_hat = i / max(y, eps); remaining = n_hat - i. When y is exactly a
// progress label i/N the division is snapped so the identity
// duration_from_progress(i, progress_label(i, N)) == N holds without
// rounding residue.
PredictionPoint duration_from_progress(int i, double y, double eps);

// Online inference state over an immutable model.
class Session {
 public:
  Session(const Model* model, int ptype);

  // Consumes the next frame (t must equal frames_consumed()+1) and returns
  // the prediction after it. Never mutates the model.
  PredictionPoint feed(const Frame& frame);

  int frames_consumed() const { return i_; }
  int ptype() const { return ptype_; }

 private:
  const Model* model_;
  int ptype_;
  int i_ = 0;
  nn::Vec h_;
};

Session open_session(const Model& model, int ptype);

struct TrainLog {
  std::vector<double> epoch_mean_loss;
};

struct TrainResult {
  Model model;
  nn::AdamState adam;
  TrainLog log;
};

// Trains for config.epochs passes: per procedure, forward the full
// sequence, BCE against l_i = i/N, exact BPTT, one Adam step. Procedure
// order is reshuffled each epoch by a generator seeded from config.seed,
// so (dataset, config) pins the result. Throws TrainError naming the epoch
// and procedure when the loss goes non-finite, DataError on channel
// mismatch.
TrainResult train(const std::vector<ProcedureRecord>& dataset,
                  const FusionConfig& config);

// Offline pass over a complete record; one point per frame.
std::vector<PredictionPoint> predict_record(const Model& model,
                                            const ProcedureRecord& record);

// Builds a seeded model of the given variant at small widths, runs one
// random sequence through forward/backward, and compares against central
// finite differences.
nn::GradCheckReport run_gradcheck(const FusionConfig& config, int seq_len,
                                  int data_seed);

}  // namespace procdur
