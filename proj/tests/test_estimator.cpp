#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "procdur/checkpoint.hpp"
#include "procdur/errors.hpp"
#include "procdur/estimator.hpp"
#include "procdur/signals.hpp"

using namespace procdur;

namespace {

FusionConfig small_config(const std::string& variant, int seed) {
  FusionConfig c;
  c.use_image = variant.find('v') != std::string::npos;
  c.use_tools = variant.find('t') != std::string::npos;
  c.use_device = variant.find('d') != std::string::npos;
  c.use_ptype = true;
  c.d_img = 4;
  c.enc_image = 3;
  c.enc_tools = 3;
  c.enc_device = 3;
  c.hidden = 6;
  c.epochs = 2;
  c.seed = seed;
  return c;
}

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("progress labels") {
  CHECK(progress_label(10, 10) == 1.0);
  CHECK(progress_label(1, 2) == 0.5);
  CHECK_THROWS_AS((void)progress_label(0, 5), DataError);
  CHECK_THROWS_AS((void)progress_label(6, 5), DataError);
}

TEST_CASE("duration from progress follows the inversion formula") {
  auto p = duration_from_progress(600, 0.5, 1e-4);
  CHECK(p.n_hat == 1200.0);
  CHECK(p.remaining == 600.0);

  p = duration_from_progress(10, 0.0, 1e-4);
  CHECK(p.n_hat == 100000.0);

  p = duration_from_progress(75, 1.0, 1e-4);
  CHECK(p.n_hat == 75.0);
  CHECK(p.remaining == 0.0);
}

TEST_CASE("inversion is exact against the labeling") {
  for (int n : {1, 2, 7, 100, 977}) {
    for (int i = 1; i <= n; ++i) {
      auto p = duration_from_progress(i, progress_label(i, n), 1e-4);
      REQUIRE(p.n_hat == static_cast<double>(n));
      REQUIRE(p.remaining == static_cast<double>(n - i));
    }
  }
}

TEST_CASE("model construction widths and naming") {
  FusionConfig d = small_config("d", 1);
  Model md = build_model(d);
  CHECK(d.variant_name() == "D-Net");
  CHECK(md.net.recurrent_input_dim() == d.enc_device + 5);

  FusionConfig vtd = small_config("vtd", 1);
  Model mv = build_model(vtd);
  CHECK(vtd.variant_name() == "VTD-Net");
  CHECK(mv.net.recurrent_input_dim() ==
        vtd.enc_image + vtd.enc_tools + vtd.enc_device + 5);

  FusionConfig bad = small_config("d", 1);
  bad.use_device = false;
  CHECK_THROWS_AS((void)build_model(bad), ConfigError);

  SUBCASE("same seed gives identical parameters") {
    Model a = build_model(d);
    Model b = build_model(d);
    auto ra = nn::tensor_refs(a.net);
    auto rb = nn::tensor_refs(b.net);
    for (size_t i = 0; i < ra.size(); ++i) CHECK(*ra[i].data == *rb[i].data);
  }
}

TEST_CASE("input assembly order and one-hot tail") {
  auto rec = testfix::tiny_record("r", 3, 4, 4, 5);

  FusionConfig t_only = small_config("t", 1);
  t_only.use_ptype = false;
  t_only.enc_tools = 8;
  Model mt = build_model(t_only);
  nn::Vec u = assemble_input(mt, rec.frames[0], rec.ptype);
  CHECK(u.size() == 8);

  FusionConfig vtd = small_config("vtd", 1);
  Model mv = build_model(vtd);
  nn::Vec raw = assemble_raw_input(vtd, rec.frames[0], 3);
  REQUIRE(static_cast<int>(raw.size()) == vtd.raw_input_dim());
  // Tail is the type one-hot for ptype 3.
  size_t base = raw.size() - 5;
  CHECK(raw[base + 0] == 0.0);
  CHECK(raw[base + 2] == 1.0);
  CHECK(raw[base + 4] == 0.0);
  // Front is the image block.
  CHECK(raw[0] == rec.frames[0].image[0]);

  SUBCASE("missing channel is rejected") {
    Frame no_tools = rec.frames[0];
    no_tools.tools.clear();
    CHECK_THROWS_AS((void)assemble_raw_input(vtd, no_tools, 3), DataError);
  }
}

TEST_CASE("a fused model with zeroed side encoders matches the device path") {
  FusionConfig vtd = small_config("vtd", 3);
  Model fused = build_model(vtd);
  FusionConfig d = small_config("d", 3);
  Model dev = build_model(d);
  // Same device encoder in both models.
  for (auto& b : fused.net.blocks)
    if (b.name == "device") {
      for (auto& db : dev.net.blocks)
        if (db.name == "device") db.enc = b.enc;
    }
  // Zero the image and tool encoders; tanh(0) = 0.
  for (auto& b : fused.net.blocks) {
    if (b.name == "device") continue;
    std::fill(b.enc.w.a.begin(), b.enc.w.a.end(), 0.0);
    std::fill(b.enc.b.begin(), b.enc.b.end(), 0.0);
  }

  auto rec = testfix::tiny_record("r", 2, 3, 4, 6);
  nn::Vec uf = assemble_input(fused, rec.frames[0], 2);
  nn::Vec ud = assemble_input(dev, rec.frames[0], 2);
  // Image and tool segments are exactly zero.
  for (int k = 0; k < vtd.enc_image + vtd.enc_tools; ++k)
    CHECK(uf[static_cast<size_t>(k)] == 0.0);
  // Device segment and type tail agree with the device-only model.
  for (size_t k = 0; k < ud.size(); ++k)
    CHECK(uf[static_cast<size_t>(vtd.enc_image + vtd.enc_tools) + k] == ud[k]);
}

TEST_CASE("streaming sessions reproduce the batch pass bitwise") {
  FusionConfig c = small_config("vtd", 9);
  Model model = build_model(c);
  auto rec = testfix::tiny_record("r", 4, 25, 4, 7);

  auto points = predict_record(model, rec);
  REQUIRE(points.size() == 25);

  std::vector<nn::Vec> inputs;
  for (const auto& f : rec.frames)
    inputs.push_back(assemble_raw_input(c, f, rec.ptype));
  auto ys = nn::forward_sequence(model.net, inputs);
  for (size_t i = 0; i < ys.size(); ++i) {
    CHECK(points[i].y == ys[i]);  // bitwise
    CHECK(points[i].i == static_cast<int>(i) + 1);
    CHECK(points[i].n_hat >= points[i].i);
    CHECK(points[i].remaining >= 0.0);
  }

  SUBCASE("out-of-order frames are rejected") {
    Session s = open_session(model, rec.ptype);
    (void)s.feed(rec.frames[0]);
    CHECK_THROWS_AS((void)s.feed(rec.frames[2]), DataError);
  }
  SUBCASE("interleaved sessions match serial runs") {
    Session s1 = open_session(model, rec.ptype);
    Session s2 = open_session(model, rec.ptype);
    std::vector<double> y1, y2;
    for (const auto& f : rec.frames) {
      y1.push_back(s1.feed(f).y);
      y2.push_back(s2.feed(f).y);
    }
    for (size_t i = 0; i < ys.size(); ++i) {
      CHECK(y1[i] == ys[i]);
      CHECK(y2[i] == ys[i]);
    }
  }
}

TEST_CASE("training runs, is deterministic, and validates channels") {
  std::vector<ProcedureRecord> data;
  data.push_back(testfix::tiny_record("a", 1, 30, 4, 1));
  data.push_back(testfix::tiny_record("b", 2, 40, 4, 2));
  data.push_back(testfix::tiny_record("c", 4, 35, 4, 3));

  FusionConfig c = small_config("vtd", 11);
  SUBCASE("zero epochs returns the initialized model") {
    FusionConfig c0 = c;
    c0.epochs = 0;
    TrainResult r = train(data, c0);
    Model fresh = build_model(c0);
    auto ra = nn::tensor_refs(r.model.net);
    auto rb = nn::tensor_refs(fresh.net);
    for (size_t i = 0; i < ra.size(); ++i) CHECK(*ra[i].data == *rb[i].data);
    CHECK(r.log.epoch_mean_loss.empty());
  }
  SUBCASE("same seed and data give identical checkpoints") {
    TrainResult r1 = train(data, c);
    TrainResult r2 = train(data, c);
    auto dir = testfix::fresh_dir("train-det");
    save_checkpoint(r1.model, (dir / "a.ckpt").string(), &r1.adam);
    save_checkpoint(r2.model, (dir / "b.ckpt").string(), &r2.adam);
    CHECK(file_bytes(dir / "a.ckpt") == file_bytes(dir / "b.ckpt"));
    std::filesystem::remove_all(dir);
  }
  SUBCASE("channel mismatch is reported") {
    auto tools_only = data;
    for (auto& r : tools_only) {
      r.channels.device = false;
      r.channels.image = false;
      r.channels.d_img = 0;
      for (auto& f : r.frames) {
        f.device_raw.clear();
        f.device.clear();
        f.image.clear();
      }
    }
    CHECK_THROWS_AS((void)train(tools_only, small_config("d", 1)), DataError);
  }
  SUBCASE("gradient clipping config trains") {
    FusionConfig cc = c;
    cc.clip_norm = 1.0;
    cc.epochs = 1;
    TrainResult r = train(data, cc);
    CHECK(r.log.epoch_mean_loss.size() == 1);
    CHECK(std::isfinite(r.log.epoch_mean_loss[0]));
  }
}

TEST_CASE("loss decreases monotonically on one constant-signal procedure") {
  // One procedure whose channels are constant; the remaining structure
  // (progress labeling over time) is learnable from the state alone.
  auto rec = testfix::tiny_record("const", 1, 30, 4, 4);
  for (auto& f : rec.frames) {
    f.device_raw = rec.frames[0].device_raw;
    f.device = rec.frames[0].device;
    f.tools = rec.frames[0].tools;
    f.image = rec.frames[0].image;
  }
  validate_record(rec);

  FusionConfig c = small_config("vtd", 13);
  c.epochs = 50;
  c.lr = 2e-4;
  TrainResult r = train({rec}, c);
  REQUIRE(r.log.epoch_mean_loss.size() == 50);
  for (size_t e = 1; e < r.log.epoch_mean_loss.size(); ++e) {
    CHECK(r.log.epoch_mean_loss[e] <= r.log.epoch_mean_loss[e - 1] + 1e-12);
  }
}

TEST_CASE("checkpoints round-trip and reject damage") {
  FusionConfig c = small_config("td", 17);
  c.clip_norm = 2.5;
  Model model = build_model(c);
  auto dir = testfix::fresh_dir("ckpt");
  auto path = (dir / "m.ckpt").string();

  SUBCASE("parameters round-trip bitwise, with and without optimizer state") {
    nn::AdamState adam;
    nn::AdamParams hp;
    hp.lr = c.lr;
    adam.init(model.net, hp);
    adam.t = 3;
    adam.m[0][0] = 0.125;
    adam.v[0][0] = 0.0625;
    save_checkpoint(model, path, &adam);
    LoadedCheckpoint loaded = load_checkpoint(path);
    auto ra = nn::tensor_refs(model.net);
    auto rb = nn::tensor_refs(loaded.model.net);
    for (size_t i = 0; i < ra.size(); ++i) CHECK(*ra[i].data == *rb[i].data);
    CHECK(loaded.model.config.variant_name() == "TD-Net");
    CHECK(loaded.model.config.clip_norm.has_value());
    CHECK(*loaded.model.config.clip_norm == 2.5);
    REQUIRE(loaded.adam.has_value());
    CHECK(loaded.adam->t == 3);
    CHECK(loaded.adam->m[0][0] == 0.125);
    CHECK(loaded.adam->v[0][0] == 0.0625);

    save_checkpoint(model, path);
    CHECK_FALSE(load_checkpoint(path).adam.has_value());
  }
  SUBCASE("version and convention tampering are rejected") {
    save_checkpoint(model, path);
    std::string text = file_bytes(path);
    {
      auto pos = text.find("\"format_version\": 1");
      REQUIRE(pos != std::string::npos);
      std::string bad = text;
      bad.replace(pos, 19, "\"format_version\": 7");
      std::ofstream out(path, std::ios::binary);
      out << bad;
      out.close();
      CHECK_THROWS_AS((void)load_checkpoint(path), ConfigError);
    }
    {
      auto pos = text.find("reset-inside-candidate");
      REQUIRE(pos != std::string::npos);
      std::string bad = text;
      bad.replace(pos, 22, "reset-after-candidate!");
      std::ofstream out(path, std::ios::binary);
      out << bad;
      out.close();
      CHECK_THROWS_AS((void)load_checkpoint(path), ConfigError);
    }
  }
  SUBCASE("truncation is a structured error") {
    save_checkpoint(model, path);
    std::string text = file_bytes(path);
    std::ofstream out(path, std::ios::binary);
    out << text.substr(0, text.size() / 3);
    out.close();
    CHECK_THROWS_AS((void)load_checkpoint(path), Error);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("built-in gradient check passes for every variant") {
  for (const std::string v : {"v", "t", "d", "td", "vt", "vtd"}) {
    FusionConfig c = small_config(v, 23);
    auto report = run_gradcheck(c, 8, 24);
    INFO("variant ", v, " worst tensor ", report.worst.tensor);
    CHECK(report.max_rel < 1e-4);
  }
}
