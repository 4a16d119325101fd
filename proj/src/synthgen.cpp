#include "procdur/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "procdur/errors.hpp"
#include "procdur/signals.hpp"
#include "procdur/types.hpp"

namespace procdur {

using nlohmann::json;

namespace {

// Reference cohort: counts 39/11/4/21/5 and mean lengths 156/107/102/41/91
// minutes; the weighted mean (112.3125 min) is rescaled to 600 s.
constexpr double kTypeCounts[5] = {39, 11, 4, 21, 5};
constexpr double kTypeMeanMinutes[5] = {156, 107, 102, 41, 91};
constexpr double kCohortMeanMinutes = 112.3125;
constexpr double kTargetMeanSeconds = 600.0;

// Continuous device signals driven by per-phase levels, in registry order.
constexpr int kLevelSignals[] = {0, 1, 2, 3, 8, 9, 10, 12, 13};
constexpr int kBinarySignals[] = {6, 7, 11};
constexpr int kVolumeSignal = 4;
constexpr int kSupplySignal = 5;

// Tunables of the channel construction (not part of SynthSpec; they define
// what "informativeness" means for each modality).
constexpr double kVolumeSlopeLogNoise = 0.45;   // duration blur on the ramp
constexpr double kVolumeFlatLevel = 0.55;       // fill fraction at info 0
constexpr double kRandRampLogSpread = 0.9;      // slope range at partial info
constexpr double kBinaryBaseRate = 0.35;
constexpr double kToolBaseRate = 0.3;
constexpr double kBinaryDwell = 1.0 / 20.0;
constexpr double kToolDwell = 1.0 / 15.0;
constexpr double kImageProgressGain = 0.2;
constexpr double kImageNoiseFactor = 10.0;      // image sigma = factor * noise_sigma

std::uint64_t proc_seed(int seed, int index) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(seed)) *
             0x9E3779B97F4A7C15ULL +
         static_cast<std::uint64_t>(index) * 0xBF58476D1CE4E5B9ULL + 1ULL;
}

// Per-type, per-phase channel statistics drawn once from the master stream.
struct TypeProfile {
  // [phase][slot] indexed by position in kLevelSignals / kBinarySignals.
  std::vector<std::array<double, 9>> level;
  std::vector<std::array<double, 3>> bin_rate;
  std::vector<std::array<double, kToolCount>> tool_rate;
  std::vector<std::vector<double>> embed;  // [phase][d_img]
  std::vector<double> direction;           // [d_img]
};

std::vector<TypeProfile> draw_profiles(const SynthSpec& spec,
                                       std::mt19937_64& master) {
  std::uniform_real_distribution<double> lvl(0.15, 0.85);
  std::uniform_real_distribution<double> rate(0.05, 0.95);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<TypeProfile> profiles(kProcedureTypeCount);
  for (auto& prof : profiles) {
    prof.level.resize(static_cast<size_t>(spec.phases_per_type));
    prof.bin_rate.resize(static_cast<size_t>(spec.phases_per_type));
    prof.tool_rate.resize(static_cast<size_t>(spec.phases_per_type));
    prof.embed.resize(static_cast<size_t>(spec.phases_per_type));
    // Timeline halves share one embedding: the image stream alone resolves
    // only coarse position (plus its weak progress drift), so the fine
    // phase structure has to come from the other modalities.
    std::array<std::vector<double>, 2> half_embed;
    for (auto& he : half_embed) {
      he.resize(static_cast<size_t>(spec.d_img));
      for (auto& v : he) v = gauss(master);
    }
    for (int p = 0; p < spec.phases_per_type; ++p) {
      auto& lp = prof.level[static_cast<size_t>(p)];
      for (auto& v : lp) v = lvl(master);
      auto& bp = prof.bin_rate[static_cast<size_t>(p)];
      for (auto& v : bp) v = rate(master);
      auto& tp = prof.tool_rate[static_cast<size_t>(p)];
      for (auto& v : tp) v = rate(master);
      prof.embed[static_cast<size_t>(p)] =
          half_embed[static_cast<size_t>(2 * p / spec.phases_per_type)];
    }
    prof.direction.resize(static_cast<size_t>(spec.d_img));
    double norm_sq = 0.0;
    for (auto& v : prof.direction) {
      v = gauss(master);
      norm_sq += v * v;
    }
    double norm = std::sqrt(std::max(norm_sq, 1e-12));
    for (auto& v : prof.direction) v = v / norm * std::sqrt(static_cast<double>(spec.d_img));
  }
  return profiles;
}

// Largest-remainder allocation of n procedures to the five types.
std::array<int, 5> type_counts(const SynthSpec& spec) {
  std::array<int, 5> counts{};
  std::array<double, 5> frac{};
  int assigned = 0;
  for (int t = 1; t <= kProcedureTypeCount; ++t) {
    auto it = spec.type_mix.find(t);
    double prop = it == spec.type_mix.end() ? 0.0 : it->second;
    double exact = prop * spec.n_procedures;
    counts[static_cast<size_t>(t - 1)] = static_cast<int>(std::floor(exact));
    frac[static_cast<size_t>(t - 1)] = exact - std::floor(exact);
    assigned += counts[static_cast<size_t>(t - 1)];
  }
  int leftover = spec.n_procedures - assigned;
  std::array<int, 5> order{0, 1, 2, 3, 4};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[static_cast<size_t>(a)] > frac[static_cast<size_t>(b)]; });
  for (int k = 0; k < leftover; ++k) counts[static_cast<size_t>(order[static_cast<size_t>(k % 5)])] += 1;
  return counts;
}

}  // namespace

SynthSpec::SynthSpec() {
  double total = 0.0;
  for (double c : kTypeCounts) total += c;
  const double scale = kTargetMeanSeconds / (kCohortMeanMinutes * 60.0);
  for (int t = 1; t <= kProcedureTypeCount; ++t) {
    type_mix[t] = kTypeCounts[t - 1] / total;
    mean_duration[t] = kTypeMeanMinutes[t - 1] * 60.0 * scale;
  }
}

void SynthSpec::validate() const {
  if (n_procedures < 1)
    throw ConfigError("n_procedures must be >= 1, got " + std::to_string(n_procedures));
  if (phases_per_type < 1 || phases_per_type > 50)
    throw ConfigError("phases_per_type must lie in 1..50, got " +
                      std::to_string(phases_per_type));
  double sum = 0.0;
  for (const auto& [t, prop] : type_mix) {
    if (!valid_ptype(t))
      throw ConfigError("type_mix names invalid procedure type " + std::to_string(t));
    if (!(prop >= 0.0) || !std::isfinite(prop))
      throw ConfigError("type_mix proportion for type " + std::to_string(t) +
                        " must be >= 0");
    sum += prop;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw ConfigError("type_mix proportions sum to " + std::to_string(sum) +
                      ", expected 1");
  for (const auto& [t, m] : mean_duration) {
    if (!valid_ptype(t))
      throw ConfigError("mean_duration names invalid procedure type " + std::to_string(t));
    if (!(m >= 60.0) || !std::isfinite(m))
      throw ConfigError("mean_duration for type " + std::to_string(t) +
                        " must be >= 60 s");
  }
  for (const auto& [t, prop] : type_mix) {
    if (prop > 0.0 && mean_duration.find(t) == mean_duration.end())
      throw ConfigError("type " + std::to_string(t) + " has weight but no mean_duration");
  }
  if (!(duration_cv > 0.0) || !std::isfinite(duration_cv))
    throw ConfigError("duration_cv must be positive");
  for (double info : {info_image, info_tools, info_device})
    if (!(info >= 0.0 && info <= 1.0))
      throw ConfigError("informativeness values must lie in [0,1]");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ConfigError("noise_sigma must be >= 0");
  if (d_img < 1) throw ConfigError("d_img must be >= 1, got " + std::to_string(d_img));
}

GenResult generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 master(static_cast<std::uint64_t>(spec.seed));
  const auto profiles = draw_profiles(spec, master);
  const auto counts = type_counts(spec);
  const auto& registry = signal_registry();

  // Weighted mean duration anchors the uninformative ramp slope range.
  double mean_bar = 0.0;
  for (int t = 1; t <= kProcedureTypeCount; ++t) {
    auto it = spec.mean_duration.find(t);
    if (it != spec.mean_duration.end())
      mean_bar += spec.type_mix.at(t) * it->second;
  }
  if (!(mean_bar > 0.0)) mean_bar = kTargetMeanSeconds;

  GenResult result;
  result.records.reserve(static_cast<size_t>(spec.n_procedures));
  result.traces.reserve(static_cast<size_t>(spec.n_procedures));

  const double sigma_ln = std::sqrt(std::log1p(spec.duration_cv * spec.duration_cv));
  int index = 0;
  for (int t = 1; t <= kProcedureTypeCount; ++t) {
    for (int c = 0; c < counts[static_cast<size_t>(t - 1)]; ++c) {
      ++index;
      std::mt19937_64 rng(proc_seed(spec.seed, index));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);

      const TypeProfile& prof = profiles[static_cast<size_t>(t - 1)];
      const double mean_t = spec.mean_duration.at(t);
      const double mu_ln = std::log(mean_t) - 0.5 * sigma_ln * sigma_ln;
      int n = static_cast<int>(std::llround(std::exp(mu_ln + sigma_ln * gauss(rng))));
      n = std::max(n, 60);

      // Volume ramp: reaches v_frac of full scale around frame n_eff. At
      // info 1 the slope encodes the true duration (log-blurred); partial
      // info mixes in an unrelated random slope.
      const double v_frac = 0.85 + 0.15 * unit(rng);
      const double ln_rand = std::log(mean_bar) +
                             kRandRampLogSpread * (2.0 * unit(rng) - 1.0);
      const double ln_eff = spec.info_device * std::log(static_cast<double>(n)) +
                            (1.0 - spec.info_device) * ln_rand +
                            kVolumeSlopeLogNoise * gauss(rng);
      const double n_eff = std::exp(ln_eff);

      // Phase boundaries: random positive shares of the timeline.
      const int phases = spec.phases_per_type;
      std::vector<double> weights(static_cast<size_t>(phases));
      double wsum = 0.0;
      for (auto& w : weights) {
        w = 0.5 + unit(rng);
        wsum += w;
      }
      std::vector<int> boundaries(static_cast<size_t>(phases));
      boundaries[0] = 1;
      double cum = 0.0;
      for (int p = 1; p < phases; ++p) {
        cum += weights[static_cast<size_t>(p - 1)];
        int b = 1 + static_cast<int>(std::llround(cum / wsum * n));
        b = std::max(b, boundaries[static_cast<size_t>(p - 1)] + 1);
        b = std::min(b, n - (phases - 1 - p));
        boundaries[static_cast<size_t>(p)] = b;
      }

      ProcedureRecord rec;
      char idbuf[16];
      std::snprintf(idbuf, sizeof(idbuf), "p%04d", index);
      rec.id = idbuf;
      rec.ptype = t;
      rec.channels.device = true;
      rec.channels.tools = true;
      rec.channels.image = true;
      rec.channels.d_img = spec.d_img;
      rec.frames.reserve(static_cast<size_t>(n));

      std::vector<double> bin_state(std::size(kBinarySignals), 0.0);
      std::vector<double> tool_state(kToolCount, 0.0);
      const double img_sigma = kImageNoiseFactor * spec.noise_sigma;

      for (int i = 1; i <= n; ++i) {
        int phase = phases - 1;
        for (int p = 0; p < phases; ++p)
          if (i >= boundaries[static_cast<size_t>(p)]) phase = p;
        const double progress = static_cast<double>(i) / n;

        Frame f;
        f.t = i;
        f.device_raw.assign(kDeviceSignalCount, 0.0);

        for (size_t s = 0; s < std::size(kLevelSignals); ++s) {
          int j = kLevelSignals[s];
          double frac = spec.info_device * prof.level[static_cast<size_t>(phase)][s] +
                        (1.0 - spec.info_device) * 0.5 +
                        spec.noise_sigma * gauss(rng);
          frac = std::clamp(frac, 0.0, 1.0);
          const auto& sig = registry[static_cast<size_t>(j)];
          f.device_raw[static_cast<size_t>(j)] =
              sig.range_min + frac * (sig.range_max - sig.range_min);
        }
        {
          // The time-dependent part fades out entirely at info 0 so an
          // uninformative stream carries no clock at all.
          const auto& sig = registry[kVolumeSignal];
          double ramp = std::min(1.0, static_cast<double>(i) / n_eff);
          double frac = v_frac * (spec.info_device * ramp +
                                  (1.0 - spec.info_device) * kVolumeFlatLevel);
          f.device_raw[kVolumeSignal] =
              sig.range_min + frac * (sig.range_max - sig.range_min);
        }
        {
          const auto& sig = registry[kSupplySignal];
          double frac = std::clamp(0.65 + spec.noise_sigma * gauss(rng), 0.0, 1.0);
          f.device_raw[kSupplySignal] =
              sig.range_min + frac * (sig.range_max - sig.range_min);
        }
        for (size_t s = 0; s < std::size(kBinarySignals); ++s) {
          double p_on = spec.info_device * prof.bin_rate[static_cast<size_t>(phase)][s] +
                        (1.0 - spec.info_device) * kBinaryBaseRate;
          if (i == 1 || unit(rng) < kBinaryDwell)
            bin_state[s] = unit(rng) < p_on ? 1.0 : 0.0;
          f.device_raw[static_cast<size_t>(kBinarySignals[s])] = bin_state[s];
        }

        f.tools.resize(kToolCount);
        for (int j = 0; j < kToolCount; ++j) {
          double q = spec.info_tools *
                         prof.tool_rate[static_cast<size_t>(phase)][static_cast<size_t>(j)] +
                     (1.0 - spec.info_tools) * kToolBaseRate;
          if (i == 1 || unit(rng) < kToolDwell)
            tool_state[static_cast<size_t>(j)] = unit(rng) < q ? 1.0 : 0.0;
          f.tools[static_cast<size_t>(j)] = tool_state[static_cast<size_t>(j)];
        }

        f.image.resize(static_cast<size_t>(spec.d_img));
        const auto& emb = prof.embed[static_cast<size_t>(phase)];
        for (int d = 0; d < spec.d_img; ++d) {
          double v = spec.info_image *
                         (emb[static_cast<size_t>(d)] +
                          kImageProgressGain * progress * prof.direction[static_cast<size_t>(d)]) +
                     img_sigma * gauss(rng);
          f.image[static_cast<size_t>(d)] = v;
        }

        f.device = normalize_device(f.device_raw);
        rec.frames.push_back(std::move(f));
      }

      validate_record(rec);
      PhaseTrace trace;
      trace.id = rec.id;
      trace.ptype = t;
      trace.n = n;
      trace.boundaries = boundaries;
      result.records.push_back(std::move(rec));
      result.traces.push_back(std::move(trace));
    }
  }
  return result;
}

OracleView oracle_progress(const ProcedureRecord& record,
                           const PhaseTrace& trace) {
  if (trace.id != record.id || trace.ptype != record.ptype ||
      trace.n != record.duration_n())
    throw DataError("trace does not belong to record '" + record.id +
                    "' (foreign record)");
  if (trace.boundaries.empty() || trace.boundaries[0] != 1)
    throw DataError("trace for '" + trace.id + "' is malformed");
  OracleView view;
  view.progress.reserve(static_cast<size_t>(trace.n));
  view.phases.reserve(static_cast<size_t>(trace.n));
  for (int i = 1; i <= trace.n; ++i) {
    view.progress.push_back(static_cast<double>(i) / trace.n);
    int phase = static_cast<int>(trace.boundaries.size()) - 1;
    for (size_t p = 0; p < trace.boundaries.size(); ++p)
      if (i >= trace.boundaries[p]) phase = static_cast<int>(p);
    view.phases.push_back(phase);
  }
  return view;
}

void save_traces(const std::vector<PhaseTrace>& traces, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "procdur-trace";
  json arr = json::array();
  for (const auto& t : traces) {
    json e;
    e["id"] = t.id;
    e["ptype"] = t.ptype;
    e["n"] = t.n;
    e["boundaries"] = t.boundaries;
    arr.push_back(std::move(e));
  }
  j["traces"] = std::move(arr);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<PhaseTrace> load_traces(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path, 0, std::string("not a valid trace file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version") ||
      !j["format_version"].is_number_integer() ||
      j["format_version"].get<int>() != 1 || !j.contains("traces") ||
      !j["traces"].is_array())
    throw ParseError(path, 0, "not a valid trace file");
  std::vector<PhaseTrace> traces;
  for (const auto& e : j["traces"]) {
    PhaseTrace t;
    t.id = e.at("id").get<std::string>();
    t.ptype = e.at("ptype").get<int>();
    t.n = e.at("n").get<int>();
    t.boundaries = e.at("boundaries").get<std::vector<int>>();
    traces.push_back(std::move(t));
  }
  return traces;
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path, 0, std::string("not a valid spec file: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(path, 0, "spec root must be an object");

  static const char* known[] = {"n_procedures", "type_mix", "phases_per_type",
                                "mean_duration", "duration_cv", "info_image",
                                "info_tools", "info_device", "noise_sigma",
                                "d_img", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) ok = true;
    if (!ok) throw ParseError(path, 0, "unknown key '" + it.key() + "'");
  }

  SynthSpec spec;
  auto get_int = [&](const char* key, int& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer())
      throw ParseError(path, 0, std::string("key '") + key + "' must be an integer");
    dst = j[key].get<int>();
  };
  auto get_real = [&](const char* key, double& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_number())
      throw ParseError(path, 0, std::string("key '") + key + "' must be a number");
    dst = j[key].get<double>();
  };
  auto get_map = [&](const char* key, std::map<int, double>& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_object())
      throw ParseError(path, 0, std::string("key '") + key +
                                    "' must map type ids to numbers");
    std::map<int, double> m;
    for (auto it = j[key].begin(); it != j[key].end(); ++it) {
      int t;
      try {
        size_t pos = 0;
        t = std::stoi(it.key(), &pos);
        if (pos != it.key().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError(path, 0, std::string("key '") + key +
                                      "' has non-integer type id '" + it.key() + "'");
      }
      if (!it.value().is_number())
        throw ParseError(path, 0, std::string("key '") + key +
                                      "' must map type ids to numbers");
      m[t] = it.value().get<double>();
    }
    dst = std::move(m);
  };

  get_int("n_procedures", spec.n_procedures);
  get_map("type_mix", spec.type_mix);
  get_int("phases_per_type", spec.phases_per_type);
  get_map("mean_duration", spec.mean_duration);
  get_real("duration_cv", spec.duration_cv);
  get_real("info_image", spec.info_image);
  get_real("info_tools", spec.info_tools);
  get_real("info_device", spec.info_device);
  get_real("noise_sigma", spec.noise_sigma);
  get_int("d_img", spec.d_img);
  get_int("seed", spec.seed);
  spec.validate();
  return spec;
}

}  // namespace procdur
