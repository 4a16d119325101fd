#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "procdur/checkpoint.hpp"
#include "procdur/config_io.hpp"
#include "procdur/dataset_io.hpp"
#include "procdur/errors.hpp"
#include "procdur/estimator.hpp"
#include "procdur/evalbench.hpp"
#include "procdur/synthgen.hpp"

namespace {

using nlohmann::json;
using namespace procdur;

// PROCDUR_SEED supplies the seed when no --seed flag is given.
int env_seed(int fallback) {
  const char* s = std::getenv("PROCDUR_SEED");
  if (!s) return fallback;
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != std::string(s).size())
      throw ConfigError("PROCDUR_SEED is not an integer: '" + std::string(s) + "'");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("PROCDUR_SEED is not an integer: '" + std::string(s) + "'");
  }
}

void print_config_line(const std::string& subcommand, const json& j) {
  json line = j;
  line["subcommand"] = subcommand;
  std::cerr << "config: " << line.dump() << "\n";
}

struct VariantFlag {
  std::string value = "vtd";
};

void set_variant(FusionConfig& config, const std::string& v) {
  std::string variant = v;
  for (auto& c : variant) c = static_cast<char>(std::tolower(c));
  config.use_image = config.use_tools = config.use_device = false;
  if (variant == "v") {
    config.use_image = true;
  } else if (variant == "t") {
    config.use_tools = true;
  } else if (variant == "d") {
    config.use_device = true;
  } else if (variant == "td") {
    config.use_tools = config.use_device = true;
  } else if (variant == "vt") {
    config.use_image = config.use_tools = true;
  } else if (variant == "vtd") {
    config.use_image = config.use_tools = config.use_device = true;
  } else {
    throw ConfigError("unknown variant '" + v +
                      "' (expected v, t, d, td, vt or vtd)");
  }
}

// Shared training flags for `train` and `eval`.
struct TrainFlags {
  std::string preset = "desk";
  int seed = 42;
  int epochs = -1;       // -1: preset value
  double lr = -1.0;      // <0: preset value
  int hidden = 128;
  int enc_image = 64;
  int enc_tools = 16;
  int enc_device = 16;
  int d_img = 64;
  bool ptype = true;
  double clip_norm = 0.0;  // 0: off
  bool seed_given = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--preset", f.preset, "Training preset: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", f.seed, "Seed for init and shuffling")
      ->each([&f](const std::string&) { f.seed_given = true; });
  cmd->add_option("--epochs", f.epochs, "Override preset epoch count");
  cmd->add_option("--lr", f.lr, "Override preset learning rate");
  cmd->add_option("--hidden", f.hidden, "Recurrent state width");
  cmd->add_option("--enc-image", f.enc_image, "Image encoder width");
  cmd->add_option("--enc-tools", f.enc_tools, "Tool encoder width");
  cmd->add_option("--enc-device", f.enc_device, "Device encoder width");
  cmd->add_option("--d-img", f.d_img, "Image feature dimensionality");
  cmd->add_flag("--ptype,!--no-ptype", f.ptype,
                "Feed the procedure-type one-hot (default on)");
  cmd->add_option("--clip-norm", f.clip_norm, "Gradient norm clip (0 = off)");
}

FusionConfig config_from_flags(const TrainFlags& f, const std::string& variant) {
  FusionConfig config;
  set_variant(config, variant);
  apply_preset(config, f.preset);
  if (f.epochs >= 0) config.epochs = f.epochs;
  if (f.lr > 0.0) config.lr = f.lr;
  config.hidden = f.hidden;
  config.enc_image = f.enc_image;
  config.enc_tools = f.enc_tools;
  config.enc_device = f.enc_device;
  config.d_img = f.d_img;
  config.use_ptype = f.ptype;
  config.seed = f.seed_given ? f.seed : env_seed(f.seed);
  if (f.clip_norm > 0.0) config.clip_norm = f.clip_norm;
  config.validate();
  return config;
}

int cmd_gen(const std::string& spec_path, const std::string& out_dir,
            int n_override, int seed_override, bool seed_given,
            double info_image, double info_tools, double info_device,
            bool info_given[3]) {
  SynthSpec spec;
  if (!spec_path.empty()) spec = load_synth_spec(spec_path);
  if (n_override > 0) spec.n_procedures = n_override;
  spec.seed = seed_given ? seed_override : env_seed(spec.seed);
  if (info_given[0]) spec.info_image = info_image;
  if (info_given[1]) spec.info_tools = info_tools;
  if (info_given[2]) spec.info_device = info_device;
  spec.validate();

  json j;
  j["n_procedures"] = spec.n_procedures;
  j["phases_per_type"] = spec.phases_per_type;
  j["duration_cv"] = spec.duration_cv;
  j["info_image"] = spec.info_image;
  j["info_tools"] = spec.info_tools;
  j["info_device"] = spec.info_device;
  j["noise_sigma"] = spec.noise_sigma;
  j["d_img"] = spec.d_img;
  j["seed"] = spec.seed;
  json mix = json::object();
  for (const auto& [t, p] : spec.type_mix) mix[std::to_string(t)] = p;
  j["type_mix"] = std::move(mix);
  json means = json::object();
  for (const auto& [t, m] : spec.mean_duration) means[std::to_string(t)] = m;
  j["mean_duration"] = std::move(means);
  j["out"] = out_dir;
  print_config_line("gen", j);

  GenResult result = generate(spec);
  save_dataset(result.records, out_dir);
  save_traces(result.traces, out_dir + "/trace.json");
  std::cerr << "generated " << result.records.size() << " procedures into "
            << out_dir << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& variant,
              const std::string& out_path, const TrainFlags& flags) {
  FusionConfig config = config_from_flags(flags, variant);
  json j;
  j["config"] = config_to_json(config);
  j["variant"] = config.variant_name();
  j["data"] = data_path;
  j["out"] = out_path;
  print_config_line("train", j);

  std::vector<ProcedureRecord> dataset = load_dataset(data_path);
  TrainResult result = train(dataset, config);
  for (size_t e = 0; e < result.log.epoch_mean_loss.size(); ++e)
    std::cerr << "epoch " << (e + 1) << " mean_loss "
              << result.log.epoch_mean_loss[e] << "\n";
  save_checkpoint(result.model, out_path, &result.adam);
  std::cerr << "wrote checkpoint " << out_path << "\n";
  return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& input_path) {
  LoadedCheckpoint loaded = load_checkpoint(ckpt_path);
  json j;
  j["config"] = config_to_json(loaded.model.config);
  j["ckpt"] = ckpt_path;
  j["input"] = input_path;
  print_config_line("predict", j);

  std::ifstream file;
  std::istream* in = &std::cin;
  std::string name = "<stdin>";
  if (input_path != "-") {
    file.open(input_path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + input_path + "' for reading");
    in = &file;
    name = input_path;
  }
  ProcedureReader reader(*in, name);
  Session session = open_session(loaded.model, reader.header().ptype);
  while (auto frame = reader.next()) {
    PredictionPoint p = session.feed(*frame);
    std::cout << p.i << "\t" << p.y << "\t" << p.n_hat << "\t" << p.remaining
              << "\n"
              << std::flush;
  }
  return 0;
}

int cmd_eval(const std::string& data_path, const std::vector<std::string>& variants,
             const std::string& report_path, const TrainFlags& flags,
             bool no_baselines) {
  std::vector<EvalMethod> methods;
  json jvars = json::array();
  for (const auto& v : variants) {
    FusionConfig config = config_from_flags(flags, v);
    jvars.push_back(config_to_json(config));
    methods.push_back(make_variant_method(config));
  }
  EvalOptions options;
  options.seed = flags.seed_given ? flags.seed : env_seed(flags.seed);
  options.include_baselines = !no_baselines;

  json j;
  j["data"] = data_path;
  j["report"] = report_path;
  j["split_seed"] = options.seed;
  j["baselines"] = options.include_baselines;
  j["variants"] = std::move(jvars);
  print_config_line("eval", j);

  std::vector<ProcedureRecord> dataset = load_dataset(data_path);
  EvalReport report = run_eval(dataset, methods, options);
  std::string text = render_text_report(report);

  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + report_path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + report_path + "' failed");
  out.close();
  std::ofstream raw(report_path + ".json", std::ios::binary);
  if (!raw) throw IoError("cannot open '" + report_path + ".json' for writing");
  raw << report_json(report).dump(1) << "\n";
  if (!raw) throw IoError("write to '" + report_path + ".json' failed");

  std::cout << text;
  return 0;
}

int cmd_gradcheck(const std::string& variant, int hidden, int seq, int seed,
                  bool seed_given) {
  int s = seed_given ? seed : env_seed(seed);
  std::vector<std::string> variants;
  if (variant == "all") {
    variants = {"v", "t", "d", "td", "vt", "vtd"};
  } else {
    variants = {variant};
  }
  json j;
  j["variant"] = variant;
  j["hidden"] = hidden;
  j["seq"] = seq;
  j["seed"] = s;
  print_config_line("gradcheck", j);

  const double tolerance = 1e-4;
  bool ok = true;
  for (const auto& v : variants) {
    FusionConfig config;
    set_variant(config, v);
    config.use_ptype = true;
    config.hidden = hidden;
    config.d_img = 6;
    config.enc_image = 5;
    config.enc_tools = 4;
    config.enc_device = 4;
    config.seed = s;
    nn::GradCheckReport report = run_gradcheck(config, seq, s + 1);
    std::cout << config.variant_name() << "\n"
              << nn::format_gradcheck(report, tolerance);
    ok = ok && report.max_rel < tolerance;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online procedure duration estimation from multimodal 1 Hz streams"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string gen_spec;
  std::string gen_out;
  int gen_n = 0;
  int gen_seed = 7;
  bool gen_seed_given = false;
  double gi_image = 1.0, gi_tools = 1.0, gi_device = 1.0;
  bool gi_given[3] = {false, false, false};
  gen->add_option("--spec", gen_spec, "Spec file (JSON); defaults when absent")
      ->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output dataset directory")->required();
  gen->add_option("--n", gen_n, "Override procedure count");
  gen->add_option("--seed", gen_seed, "Generation seed")
      ->each([&](const std::string&) { gen_seed_given = true; });
  gen->add_option("--info-image", gi_image, "Image informativeness in [0,1]")
      ->each([&](const std::string&) { gi_given[0] = true; });
  gen->add_option("--info-tools", gi_tools, "Tool informativeness in [0,1]")
      ->each([&](const std::string&) { gi_given[1] = true; });
  gen->add_option("--info-device", gi_device, "Device informativeness in [0,1]")
      ->each([&](const std::string&) { gi_given[2] = true; });

  // train
  auto* tr = app.add_subcommand("train", "Train one variant on a dataset");
  std::string tr_data, tr_variant, tr_out;
  TrainFlags tr_flags;
  tr->add_option("--data", tr_data, "Dataset directory or file")->required();
  tr->add_option("--variant", tr_variant, "v, t, d, td, vt or vtd")->required();
  tr->add_option("--out", tr_out, "Checkpoint output path")->required();
  add_train_flags(tr, tr_flags);

  // predict
  auto* pr = app.add_subcommand("predict", "Stream per-frame predictions");
  std::string pr_ckpt, pr_input;
  pr->add_option("--ckpt", pr_ckpt, "Checkpoint path")->required();
  pr->add_option("--input", pr_input, "Procedure file ('-' for stdin)")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Cross-validated evaluation");
  std::string ev_data, ev_report;
  std::vector<std::string> ev_variants{"vtd"};
  TrainFlags ev_flags;
  bool ev_no_baselines = false;
  ev->add_option("--data", ev_data, "Dataset directory or file")->required();
  ev->add_option("--variants", ev_variants,
                 "Comma-separated variant list (v,t,d,td,vt,vtd)")
      ->delimiter(',');
  ev->add_option("--report", ev_report, "Report path (text; raw JSON at <path>.json)")
      ->required();
  ev->add_flag("--no-baselines", ev_no_baselines, "Skip baseline rows");
  add_train_flags(ev, ev_flags);

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  std::string gc_variant = "all";
  int gc_hidden = 8;
  int gc_seq = 12;
  int gc_seed = 42;
  bool gc_seed_given = false;
  gc->add_option("--variant", gc_variant, "One variant or 'all'");
  gc->add_option("--hidden", gc_hidden, "Recurrent width for the check");
  gc->add_option("--seq", gc_seq, "Sequence length for the check");
  gc->add_option("--seed", gc_seed, "Seed for init and data")
      ->each([&](const std::string&) { gc_seed_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: code=cli " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen->parsed())
      return cmd_gen(gen_spec, gen_out, gen_n, gen_seed, gen_seed_given,
                     gi_image, gi_tools, gi_device, gi_given);
    if (tr->parsed()) return cmd_train(tr_data, tr_variant, tr_out, tr_flags);
    if (pr->parsed()) return cmd_predict(pr_ckpt, pr_input);
    if (ev->parsed())
      return cmd_eval(ev_data, ev_variants, ev_report, ev_flags, ev_no_baselines);
    if (gc->parsed())
      return cmd_gradcheck(gc_variant, gc_hidden, gc_seq, gc_seed, gc_seed_given);
  } catch (const Error& e) {
    std::cerr << "error: code=" << e.code() << " " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: code=internal " << e.what() << "\n";
    return 1;
  }
  return 0;
}
