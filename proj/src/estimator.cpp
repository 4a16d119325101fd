#include "procdur/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "procdur/errors.hpp"
#include "procdur/types.hpp"

namespace procdur {

double progress_label(int i, int n) {
  if (n < 1) throw DataError("progress_label: n must be >= 1, got " + std::to_string(n));
  if (i < 1 || i > n)
    throw DataError("progress_label: i=" + std::to_string(i) +
                    " outside 1.." + std::to_string(n));
  return static_cast<double>(i) / static_cast<double>(n);
}

PredictionPoint duration_from_progress(int i, double y, double eps) {
  if (i < 1) throw DataError("duration_from_progress: i must be >= 1");
  if (!(eps > 0.0)) throw DataError("duration_from_progress: eps must be > 0");
  double denom = std::max(y, eps);
  double n_hat = static_cast<double>(i) / denom;
  // Snap to the integer total when y is exactly i/r for some integer
  // r >= i; plain division leaves 1-ulp residue for many (i, N) pairs.
  double r = std::round(n_hat);
  if (r >= static_cast<double>(i) && r > 0.0 &&
      static_cast<double>(i) / r == y) {
    n_hat = r;
  }
  PredictionPoint p;
  p.i = i;
  p.y = y;
  p.n_hat = n_hat;
  p.remaining = n_hat - static_cast<double>(i);
  return p;
}

Session::Session(const Model* model, int ptype) : model_(model), ptype_(ptype) {
  if (!valid_ptype(ptype))
    throw DataError("session: invalid procedure type " + std::to_string(ptype));
  h_.assign(static_cast<size_t>(model_->net.hidden_dim()), 0.0);
}

PredictionPoint Session::feed(const Frame& frame) {
  if (frame.t != i_ + 1)
    throw DataError("session: expected frame t=" + std::to_string(i_ + 1) +
                    ", got t=" + std::to_string(frame.t));
  nn::Vec raw = assemble_raw_input(model_->config, frame, ptype_);
  double y = nn::net_step(model_->net, raw, h_, nullptr);
  ++i_;
  return duration_from_progress(i_, y, model_->config.epsilon_progress);
}

Session open_session(const Model& model, int ptype) {
  return Session(&model, ptype);
}

namespace {

// Raw input sequence + labels for one record; validates channels up front.
void record_to_sequence(const FusionConfig& config,
                        const ProcedureRecord& record,
                        std::vector<nn::Vec>& inputs,
                        std::vector<double>& labels) {
  const int n = record.duration_n();
  if (n < 1) throw DataError("procedure '" + record.id + "' has no frames");
  if (config.use_image && !record.channels.image)
    throw DataError("procedure '" + record.id + "' lacks the image channel");
  if (config.use_tools && !record.channels.tools)
    throw DataError("procedure '" + record.id + "' lacks the tool channel");
  if (config.use_device && !record.channels.device)
    throw DataError("procedure '" + record.id + "' lacks the device channel");
  if (config.use_image && record.channels.d_img != config.d_img)
    throw DataError("procedure '" + record.id + "' has d_img=" +
                    std::to_string(record.channels.d_img) +
                    ", config expects " + std::to_string(config.d_img));
  inputs.clear();
  labels.clear();
  inputs.reserve(static_cast<size_t>(n));
  labels.reserve(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i) {
    inputs.push_back(assemble_raw_input(config, record.frames[static_cast<size_t>(i - 1)],
                                        record.ptype));
    labels.push_back(progress_label(i, n));
  }
}

}  // namespace

TrainResult train(const std::vector<ProcedureRecord>& dataset,
                  const FusionConfig& config) {
  config.validate();
  if (dataset.empty()) throw DataError("train: empty dataset");

  TrainResult result;
  result.model = build_model(config);
  nn::AdamParams hp;
  hp.lr = config.lr;
  result.adam.init(result.model.net, hp);

  // Validate every record once before touching parameters.
  {
    std::vector<nn::Vec> inputs;
    std::vector<double> labels;
    for (const auto& rec : dataset) record_to_sequence(config, rec, inputs, labels);
  }

  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 shuffle_rng(static_cast<std::uint64_t>(config.seed) ^
                              0x9E3779B97F4A7C15ULL);

  std::vector<nn::Vec> inputs;
  std::vector<double> labels;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (size_t idx : order) {
      const ProcedureRecord& rec = dataset[idx];
      record_to_sequence(config, rec, inputs, labels);
      nn::SeqCache cache;
      std::vector<double> y;
      try {
        y = nn::forward_sequence(result.model.net, inputs, &cache);
      } catch (const TrainError& e) {
        throw TrainError("epoch " + std::to_string(epoch) + ", procedure '" +
                         rec.id + "': " + e.what());
      }
      double loss = nn::bce_loss(y, labels);
      if (!std::isfinite(loss))
        throw TrainError("epoch " + std::to_string(epoch) + ", procedure '" +
                         rec.id + "': non-finite loss");
      loss_sum += loss;
      nn::Gradients grads = nn::backward_sequence(result.model.net, cache, labels);
      if (config.clip_norm) {
        double norm = grads.l2_norm();
        if (norm > *config.clip_norm) grads.scale(*config.clip_norm / norm);
      }
      nn::adam_step(result.model.net, grads, result.adam);
    }
    result.log.epoch_mean_loss.push_back(loss_sum /
                                         static_cast<double>(dataset.size()));
  }
  return result;
}

std::vector<PredictionPoint> predict_record(const Model& model,
                                            const ProcedureRecord& record) {
  Session session = open_session(model, record.ptype);
  std::vector<PredictionPoint> points;
  points.reserve(record.frames.size());
  for (const auto& frame : record.frames) points.push_back(session.feed(frame));
  return points;
}

nn::GradCheckReport run_gradcheck(const FusionConfig& config, int seq_len,
                                  int data_seed) {
  if (seq_len < 1) throw ConfigError("gradcheck: seq_len must be >= 1");
  Model model = build_model(config);
  std::mt19937_64 rng(static_cast<std::uint64_t>(data_seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int dim = config.raw_input_dim();
  std::vector<nn::Vec> inputs;
  std::vector<double> labels;
  for (int i = 1; i <= seq_len; ++i) {
    nn::Vec x(static_cast<size_t>(dim));
    for (double& v : x) v = unit(rng);
    if (config.use_ptype) {
      // Keep the trailing one-hot segment a genuine one-hot.
      for (int k = 0; k < kProcedureTypeCount; ++k)
        x[static_cast<size_t>(dim - kProcedureTypeCount + k)] = 0.0;
      x[static_cast<size_t>(dim - kProcedureTypeCount)] = 1.0;
    }
    inputs.push_back(std::move(x));
    labels.push_back(progress_label(i, seq_len));
  }
  return nn::grad_check(model.net, inputs, labels);
}

}  // namespace procdur
