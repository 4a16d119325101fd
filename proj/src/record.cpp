#include "procdur/record.hpp"

#include <cmath>

#include "procdur/errors.hpp"
#include "procdur/signals.hpp"
#include "procdur/types.hpp"

namespace procdur {

namespace {

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

void check_unit_interval(const std::vector<double>& v, const char* what,
                         const std::string& id, int t) {
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw DataError("record " + id + " frame " + std::to_string(t) + ": " +
                      what + " value out of [0,1]");
    }
  }
}

}  // namespace

void validate_record(const ProcedureRecord& rec) {
  if (!valid_id(rec.id)) {
    throw DataError("invalid record id: '" + rec.id + "'");
  }
  if (!valid_ptype(rec.ptype)) {
    throw DataError("record " + rec.id +
                    ": procedure type out of range: " + std::to_string(rec.ptype));
  }
  if (rec.frames.empty()) {
    throw DataError("record " + rec.id + ": no frames");
  }
  if (!rec.channels.device && !rec.channels.tools && !rec.channels.image) {
    throw DataError("record " + rec.id + ": no channels present");
  }
  if (rec.channels.image && rec.channels.d_img < 1) {
    throw DataError("record " + rec.id + ": image channel with d_img < 1");
  }
  const auto& reg = signal_registry();
  for (size_t idx = 0; idx < rec.frames.size(); ++idx) {
    const Frame& f = rec.frames[idx];
    const int expect_t = static_cast<int>(idx) + 1;
    if (f.t != expect_t) {
      throw DataError("record " + rec.id + ": frame times not consecutive (got t=" +
                      std::to_string(f.t) + ", expected " + std::to_string(expect_t) + ")");
    }
    if (rec.channels.device) {
      if (f.device_raw.size() != static_cast<size_t>(kDeviceSignalCount) ||
          f.device.size() != static_cast<size_t>(kDeviceSignalCount)) {
        throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                        ": device vector dimension != " + std::to_string(kDeviceSignalCount));
      }
      check_unit_interval(f.device, "device", rec.id, f.t);
      for (int k = 0; k < kDeviceSignalCount; ++k) {
        if (!std::isfinite(f.device_raw[static_cast<size_t>(k)])) {
          throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                          ": non-finite raw value for " + reg[static_cast<size_t>(k)].name);
        }
        if (reg[static_cast<size_t>(k)].kind == SignalKind::kBinary) {
          const double v = f.device_raw[static_cast<size_t>(k)];
          if (v != 0.0 && v != 1.0) {
            throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                            ": binary signal " + reg[static_cast<size_t>(k)].name +
                            " not in {0,1}");
          }
        }
      }
    } else if (!f.device_raw.empty() || !f.device.empty()) {
      throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                      ": device data present but channel not declared");
    }
    if (rec.channels.tools) {
      if (f.tools.size() != static_cast<size_t>(kToolCount)) {
        throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                        ": tools vector dimension != " + std::to_string(kToolCount));
      }
      check_unit_interval(f.tools, "tools", rec.id, f.t);
    } else if (!f.tools.empty()) {
      throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                      ": tool data present but channel not declared");
    }
    if (rec.channels.image) {
      if (f.image.size() != static_cast<size_t>(rec.channels.d_img)) {
        throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                        ": image vector dimension != " + std::to_string(rec.channels.d_img));
      }
      for (double x : f.image) {
        if (!std::isfinite(x)) {
          throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                          ": non-finite image feature");
        }
      }
    } else if (!f.image.empty()) {
      throw DataError("record " + rec.id + " frame " + std::to_string(f.t) +
                      ": image data present but channel not declared");
    }
  }
}

bool records_equal(const ProcedureRecord& a, const ProcedureRecord& b) {
  if (a.id != b.id || a.ptype != b.ptype || !(a.channels == b.channels) ||
      a.frames.size() != b.frames.size()) {
    return false;
  }
  for (size_t i = 0; i < a.frames.size(); ++i) {
    const Frame& fa = a.frames[i];
    const Frame& fb = b.frames[i];
    if (fa.t != fb.t || fa.device_raw != fb.device_raw || fa.tools != fb.tools ||
        fa.image != fb.image) {
      return false;
    }
  }
  return true;
}

}  // namespace procdur
