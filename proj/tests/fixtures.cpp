#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "procdur/checkpoint.hpp"
#include "procdur/dataset_io.hpp"
#include "procdur/signals.hpp"

namespace testfix {

using namespace procdur;

std::filesystem::path fresh_dir(const std::string& name) {
  static std::random_device rd;
  std::ostringstream tag;
  tag << "procdur-test-" << name << "-" << std::hex << rd();
  auto dir = std::filesystem::temp_directory_path() / tag.str();
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ProcedureRecord tiny_record(const std::string& id, int ptype, int n, int d_img,
                            unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& registry = signal_registry();

  ProcedureRecord rec;
  rec.id = id;
  rec.ptype = ptype;
  rec.channels.device = true;
  rec.channels.tools = true;
  rec.channels.image = d_img > 0;
  rec.channels.d_img = d_img;
  for (int i = 1; i <= n; ++i) {
    Frame f;
    f.t = i;
    f.device_raw.resize(kDeviceSignalCount);
    for (int j = 0; j < kDeviceSignalCount; ++j) {
      const auto& sig = registry[static_cast<size_t>(j)];
      if (sig.kind == SignalKind::kBinary) {
        f.device_raw[static_cast<size_t>(j)] = unit(rng) < 0.5 ? 0.0 : 1.0;
      } else {
        f.device_raw[static_cast<size_t>(j)] =
            sig.range_min + unit(rng) * (sig.range_max - sig.range_min);
      }
    }
    f.device = normalize_device(f.device_raw);
    f.tools.resize(kToolCount);
    for (auto& v : f.tools) v = unit(rng) < 0.4 ? 1.0 : 0.0;
    if (d_img > 0) {
      f.image.resize(static_cast<size_t>(d_img));
      for (auto& v : f.image) v = 2.0 * unit(rng) - 1.0;
    }
    rec.frames.push_back(std::move(f));
  }
  validate_record(rec);
  return rec;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string valid_lines(int n_frames) {
  auto rec = tiny_record("fix", 2, n_frames, 3, 11);
  auto dir = fresh_dir("fixture-src");
  auto file = dir / "fix.jsonl";
  save_procedure_file(rec, file);
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::filesystem::remove_all(dir);
  return buf.str();
}

}  // namespace

std::vector<CorruptFixture> corrupted_fixtures(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<CorruptFixture> out;
  std::string good = valid_lines(4);
  auto lines = [&]() {
    std::vector<std::string> v;
    std::istringstream in(good);
    std::string line;
    while (std::getline(in, line)) v.push_back(line);
    return v;
  }();

  auto add = [&](const std::string& name, const std::string& text,
                 const std::string& what) {
    auto p = dir / name;
    write_text(p, text);
    out.push_back({p, false, what});
  };

  add("c01_header_not_json.jsonl", "not json at all\n" + lines[1] + "\n",
      "header line is not JSON");
  {
    std::string hdr = lines[0];
    auto pos = hdr.find("\"n\":");
    std::string mangled = hdr.substr(0, pos) + "\"m\":" + hdr.substr(pos + 4);
    add("c02_header_missing_n.jsonl", mangled + "\n" + lines[1] + "\n",
        "header lacks the frame count");
  }
  {
    std::string hdr = lines[0];
    auto pos = hdr.find("\"format_version\":1");
    std::string mangled =
        hdr.substr(0, pos) + "\"format_version\":2" + hdr.substr(pos + 18);
    std::string text = mangled + "\n";
    for (size_t i = 1; i < lines.size(); ++i) text += lines[i] + "\n";
    add("c03_wrong_version.jsonl", text, "format_version is 2");
  }
  {
    // Frames jump t: 1 then 3.
    std::string text = lines[0] + "\n" + lines[1] + "\n";
    std::string f3 = lines[3];
    text += f3 + "\n" + lines[2] + "\n";
    add("c04_out_of_order.jsonl", text, "frame timestamps out of order");
  }
  {
    // Drop one device value from frame 1.
    std::string f1 = lines[1];
    auto pos = f1.find("\"device\":[");
    auto comma = f1.find(',', pos);
    std::string mangled = f1.substr(0, pos + 10) + f1.substr(comma + 1);
    std::string text = lines[0] + "\n" + mangled + "\n";
    for (size_t i = 2; i < lines.size(); ++i) text += lines[i] + "\n";
    add("c05_short_device.jsonl", text, "device vector has 13 entries");
  }
  {
    // Binary signal (insufflator_on, index 6) forced to 0.5.
    auto rec = tiny_record("fix", 2, 4, 3, 11);
    rec.frames[1].device_raw[6] = 0.5;
    std::ostringstream text;
    text << lines[0] << "\n";
    // Rebuild frame lines by hand around the same record is brittle; write
    // the bad value into the second frame line textually instead.
    std::string f2 = lines[2];
    auto pos = f2.find("\"device\":[");
    auto end = f2.find(']', pos);
    std::string arr = f2.substr(pos + 10, end - pos - 10);
    std::vector<std::string> parts;
    std::istringstream ain(arr);
    std::string tok;
    while (std::getline(ain, tok, ',')) parts.push_back(tok);
    parts[6] = "0.5";
    std::string rebuilt;
    for (size_t i = 0; i < parts.size(); ++i)
      rebuilt += (i ? "," : "") + parts[i];
    std::string mangled = f2.substr(0, pos + 10) + rebuilt + f2.substr(end);
    text << lines[1] << "\n" << mangled << "\n" << lines[3] << "\n"
         << lines[4] << "\n";
    add("c06_binary_fraction.jsonl", text.str(), "binary signal holds 0.5");
  }
  {
    // Header promises 4 frames, file holds 2.
    std::string text = lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n";
    add("c07_truncated.jsonl", text, "file ends before frame 3");
  }
  {
    std::string f1 = lines[1];
    std::string mangled = f1.substr(0, f1.size() - 1) + ",\"extra\":1}";
    std::string text = lines[0] + "\n" + mangled + "\n";
    for (size_t i = 2; i < lines.size(); ++i) text += lines[i] + "\n";
    add("c08_unknown_key.jsonl", text, "frame carries an unknown key");
  }

  // Checkpoint fixtures: corrupt a real one.
  {
    FusionConfig config;
    config.use_device = true;
    config.use_ptype = true;
    config.hidden = 4;
    config.enc_device = 3;
    config.seed = 5;
    Model model = build_model(config);
    auto ck = dir / "good.ckpt";
    save_checkpoint(model, ck.string());
    std::ifstream in(ck, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::filesystem::remove(ck);

    auto p9 = dir / "c09_truncated.ckpt";
    write_text(p9, text.substr(0, text.size() / 2));
    out.push_back({p9, true, "checkpoint cut mid-document"});

    auto pos = text.find("\"gru.bz\"");
    auto dpos = text.find("\"data\": [", pos);
    auto comma = text.find(',', dpos);
    std::string mangled = text.substr(0, dpos + 9) + "0.0," +
                          text.substr(dpos + 9);
    (void)comma;
    auto p10 = dir / "c10_extra_value.ckpt";
    write_text(p10, mangled);
    out.push_back({p10, true, "tensor holds one value too many"});
  }

  return out;
}

}  // namespace testfix
