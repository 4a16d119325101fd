#pragma once

#include <string>
#include <vector>

namespace procdur {

inline constexpr int kToolCount = 12;

// Which input channels a record carries. Channel presence is a per-record
// property: every frame of a record carries the same channel set.
struct Channels {
  bool device = false;
  bool tools = false;
  bool image = false;
  int d_img = 0;  // image feature width when image is present

  bool operator==(const Channels&) const = default;
};

// One second of multimodal input. `device` holds the normalized values the
// network consumes; `device_raw` keeps the original units so records can be
// written back out losslessly.
struct Frame {
  int t = 0;  // seconds since start, 1-based
  std::vector<double> device_raw;
  std::vector<double> device;
  std::vector<double> tools;   // 12 values in [0,1]
  std::vector<double> image;   // d_img values
};

struct ProcedureRecord {
  std::string id;
  int ptype = 0;
  Channels channels;
  std::vector<Frame> frames;  // frame i stored at index i-1, frame.t == i

  int duration_n() const { return static_cast<int>(frames.size()); }
};

// Checks every record invariant: id syntax, ptype range, consecutive 1-based
// frame times, per-record channel consistency, dimensions, value ranges and
// binary-signal exactness. Throws DataError on the first violation.
void validate_record(const ProcedureRecord& rec);

// Field-for-field equality on stored data (raw device units, not the
// derived normalized values).
bool records_equal(const ProcedureRecord& a, const ProcedureRecord& b);

}  // namespace procdur
