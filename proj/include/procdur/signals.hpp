#pragma once

#include <span>
#include <string>
#include <vector>

namespace procdur {

enum class SignalKind { kContinuous, kBinary };

// One device signal: identifier, kind and the nominal value range used for
// min-max normalization.
struct SignalSpec {
  std::string name;
  SignalKind kind = SignalKind::kContinuous;
  double range_min = 0.0;
  double range_max = 1.0;
  std::string source_device;
};

inline constexpr int kDeviceSignalCount = 14;

// Canonical registry of the 14 integrated-OR signals, in the fixed order
// used by every device vector in this library:
//   0..6  insufflator, 7..9 OR lights, 10 endoscopic light, 11..13 camera.
const std::vector<SignalSpec>& signal_registry();

// Index of a signal in the registry; throws DataError for unknown names.
int signal_index(const std::string& name);

// Min-max normalization against the registry ranges, clamped into [0,1].
// Out-of-range raw values are clamped, not rejected; non-finite values are
// rejected.
std::vector<double> normalize_device(std::span<const double> raw);

// Inverse of the scaling (no clamp); used when writing raw units back out.
double denormalize_signal(int index, double normalized);

}  // namespace procdur
