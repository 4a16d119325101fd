#include "procdur/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "procdur/errors.hpp"
#include "procdur/signals.hpp"
#include "procdur/types.hpp"

namespace procdur {

using nlohmann::json;

namespace {

json parse_line(const std::string& line, const std::string& src, long line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    throw ParseError(src, line_no, "invalid JSON");
  }
  return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& src, long line_no) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ParseError(src, line_no, "unexpected key '" + item.key() + "'");
  }
}

std::vector<double> number_array(const json& j, const char* key, size_t expect,
                                 const std::string& src, long line_no) {
  if (!j.contains(key)) {
    throw ParseError(src, line_no, std::string("missing '") + key + "' array");
  }
  const json& arr = j.at(key);
  if (!arr.is_array()) {
    throw ParseError(src, line_no, std::string("'") + key + "' is not an array");
  }
  if (arr.size() != expect) {
    throw ParseError(src, line_no, std::string("'") + key + "' has " +
                                       std::to_string(arr.size()) + " values, expected " +
                                       std::to_string(expect));
  }
  std::vector<double> out;
  out.reserve(expect);
  for (const json& v : arr) {
    if (!v.is_number()) {
      throw ParseError(src, line_no, std::string("non-numeric entry in '") + key + "'");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      throw ParseError(src, line_no, std::string("non-finite entry in '") + key + "'");
    }
    out.push_back(d);
  }
  return out;
}

}  // namespace

ProcedureReader::ProcedureReader(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {
  std::string line;
  if (!std::getline(in_, line)) {
    throw ParseError(source_, 1, "empty input, expected header line");
  }
  line_no_ = 1;
  json h = parse_line(line, source_, 1);
  if (!h.is_object()) throw ParseError(source_, 1, "header is not an object");
  reject_unknown_keys(h, {"format_version", "id", "ptype", "n", "channels"}, source_, 1);
  for (const char* k : {"format_version", "id", "ptype", "n", "channels"}) {
    if (!h.contains(k)) {
      throw ParseError(source_, 1, std::string("header missing field '") + k + "'");
    }
  }
  if (!h["format_version"].is_number_integer() ||
      h["format_version"].get<int>() != kDatasetFormatVersion) {
    throw ParseError(source_, 1, "unsupported format_version");
  }
  if (!h["id"].is_string()) throw ParseError(source_, 1, "header 'id' must be a string");
  header_.id = h["id"].get<std::string>();
  if (!h["ptype"].is_number_integer() || !valid_ptype(h["ptype"].get<int>())) {
    throw ParseError(source_, 1, "header 'ptype' must be an integer in 1..5");
  }
  header_.ptype = h["ptype"].get<int>();
  if (!h["n"].is_number_integer() || h["n"].get<int>() < 1) {
    throw ParseError(source_, 1, "header 'n' must be an integer >= 1");
  }
  header_.n = h["n"].get<int>();
  const json& ch = h["channels"];
  if (!ch.is_object()) throw ParseError(source_, 1, "header 'channels' must be an object");
  reject_unknown_keys(ch, {"device", "tools", "image", "d_img"}, source_, 1);
  for (const char* k : {"device", "tools", "image"}) {
    if (!ch.contains(k) || !ch.at(k).is_boolean()) {
      throw ParseError(source_, 1, std::string("channels.") + k + " must be a boolean");
    }
  }
  header_.channels.device = ch["device"].get<bool>();
  header_.channels.tools = ch["tools"].get<bool>();
  header_.channels.image = ch["image"].get<bool>();
  if (!ch.contains("d_img") || !ch.at("d_img").is_number_integer()) {
    throw ParseError(source_, 1, "channels.d_img must be an integer");
  }
  header_.channels.d_img = ch["d_img"].get<int>();
  if (header_.channels.image && header_.channels.d_img < 1) {
    throw ParseError(source_, 1, "channels.d_img must be >= 1 when image is present");
  }
  if (!header_.channels.device && !header_.channels.tools && !header_.channels.image) {
    throw ParseError(source_, 1, "record declares no channels");
  }
}

std::optional<Frame> ProcedureReader::next() {
  if (done_) return std::nullopt;
  std::string line;
  if (!std::getline(in_, line)) {
    if (frames_read_ != header_.n) {
      throw ParseError(source_, line_no_,
                       "expected " + std::to_string(header_.n) + " frames, got " +
                           std::to_string(frames_read_));
    }
    done_ = true;
    return std::nullopt;
  }
  ++line_no_;
  if (frames_read_ >= header_.n) {
    throw ParseError(source_, line_no_, "more frame lines than header n");
  }
  json j = parse_line(line, source_, line_no_);
  if (!j.is_object()) throw ParseError(source_, line_no_, "frame is not an object");
  reject_unknown_keys(j, {"t", "device", "tools", "img"}, source_, line_no_);
  if (!j.contains("t") || !j["t"].is_number_integer()) {
    throw ParseError(source_, line_no_, "frame missing integer 't'");
  }

  Frame f;
  f.t = j["t"].get<int>();
  if (f.t != frames_read_ + 1) {
    throw ParseError(source_, line_no_,
                     "frame times not consecutive (got t=" + std::to_string(f.t) +
                         ", expected " + std::to_string(frames_read_ + 1) + ")");
  }

  const auto& reg = signal_registry();
  if (header_.channels.device) {
    f.device_raw = number_array(j, "device", kDeviceSignalCount, source_, line_no_);
    for (int k = 0; k < kDeviceSignalCount; ++k) {
      if (reg[static_cast<size_t>(k)].kind == SignalKind::kBinary) {
        const double v = f.device_raw[static_cast<size_t>(k)];
        if (v != 0.0 && v != 1.0) {
          throw ParseError(source_, line_no_,
                           "binary signal " + reg[static_cast<size_t>(k)].name +
                               " has value outside {0,1}");
        }
      }
    }
    f.device = normalize_device(f.device_raw);
  } else if (j.contains("device")) {
    throw ParseError(source_, line_no_, "device data present but channel not declared");
  }

  if (header_.channels.tools) {
    f.tools = number_array(j, "tools", kToolCount, source_, line_no_);
    for (double v : f.tools) {
      if (v < 0.0 || v > 1.0) {
        throw ParseError(source_, line_no_, "tool value outside [0,1]");
      }
    }
  } else if (j.contains("tools")) {
    throw ParseError(source_, line_no_, "tool data present but channel not declared");
  }

  if (header_.channels.image) {
    f.image = number_array(j, "img", static_cast<size_t>(header_.channels.d_img),
                           source_, line_no_);
  } else if (j.contains("img")) {
    throw ParseError(source_, line_no_, "image data present but channel not declared");
  }

  ++frames_read_;
  return f;
}

ProcedureRecord load_procedure_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  ProcedureReader reader(in, file.string());
  ProcedureRecord rec;
  rec.id = reader.header().id;
  rec.ptype = reader.header().ptype;
  rec.channels = reader.header().channels;
  rec.frames.reserve(static_cast<size_t>(reader.header().n));
  while (auto f = reader.next()) {
    rec.frames.push_back(std::move(*f));
  }
  validate_record(rec);
  return rec;
}

std::vector<ProcedureRecord> load_dataset(const std::filesystem::path& path) {
  std::vector<ProcedureRecord> out;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == kProcedureFileExt) {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_procedure_file(f));
  } else if (std::filesystem::is_regular_file(path)) {
    out.push_back(load_procedure_file(path));
  } else {
    throw IoError("no such dataset path: " + path.string());
  }
  std::set<std::string> ids;
  for (const auto& r : out) {
    if (!ids.insert(r.id).second) {
      throw DataError("duplicate record id in dataset: " + r.id);
    }
  }
  return out;
}

void save_procedure_file(const ProcedureRecord& rec, const std::filesystem::path& file) {
  validate_record(rec);
  std::ofstream fout(file, std::ios::binary);  // binary keeps LF endings everywhere
  if (!fout) throw IoError("cannot write " + file.string());
  json h = {
      {"format_version", kDatasetFormatVersion},
      {"id", rec.id},
      {"ptype", rec.ptype},
      {"n", rec.duration_n()},
      {"channels",
       {{"device", rec.channels.device},
        {"tools", rec.channels.tools},
        {"image", rec.channels.image},
        {"d_img", rec.channels.d_img}}},
  };
  fout << h.dump() << '\n';
  for (const Frame& f : rec.frames) {
    json j;
    j["t"] = f.t;
    if (rec.channels.device) j["device"] = f.device_raw;
    if (rec.channels.tools) j["tools"] = f.tools;
    if (rec.channels.image) j["img"] = f.image;
    fout << j.dump() << '\n';
  }
  if (!fout) throw IoError("write failed: " + file.string());
}

void save_dataset(std::span<const ProcedureRecord> records,
                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create dataset directory " + dir.string());
  }
  for (const ProcedureRecord& r : records) {
    save_procedure_file(r, dir / (r.id + kProcedureFileExt));
  }
}

}  // namespace procdur
