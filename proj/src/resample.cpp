#include "procdur/resample.hpp"

#include <cmath>

#include "procdur/errors.hpp"
#include "procdur/signals.hpp"

namespace procdur {

std::vector<std::vector<double>> resample_to_1hz(std::span<const RawEvent> events,
                                                 int horizon) {
  if (horizon < 1) {
    throw DataError("resample horizon must be >= 1, got " + std::to_string(horizon));
  }
  const auto& reg = signal_registry();
  const int ns = static_cast<int>(reg.size());

  // Per-signal event list, order preserved.
  std::vector<std::vector<const RawEvent*>> per_signal(static_cast<size_t>(ns));
  std::vector<double> last_ts(static_cast<size_t>(ns), -1.0);
  for (const RawEvent& e : events) {
    const int k = signal_index(e.signal);
    if (!std::isfinite(e.timestamp) || e.timestamp < 0.0) {
      throw DataError("signal " + e.signal + ": invalid timestamp");
    }
    if (e.timestamp < last_ts[static_cast<size_t>(k)]) {
      throw DataError("signal " + e.signal + ": timestamps not non-decreasing");
    }
    last_ts[static_cast<size_t>(k)] = e.timestamp;
    per_signal[static_cast<size_t>(k)].push_back(&e);
  }

  std::vector<std::vector<double>> out(static_cast<size_t>(ns));
  for (int k = 0; k < ns; ++k) {
    const double fill = reg[static_cast<size_t>(k)].range_min;
    auto& row = out[static_cast<size_t>(k)];
    row.assign(static_cast<size_t>(horizon), fill);
    const auto& evs = per_signal[static_cast<size_t>(k)];
    size_t next = 0;
    double held = fill;
    bool seen = false;
    for (int t = 1; t <= horizon; ++t) {
      while (next < evs.size() && evs[next]->timestamp <= static_cast<double>(t)) {
        held = evs[next]->value;
        seen = true;
        ++next;
      }
      row[static_cast<size_t>(t - 1)] = seen ? held : fill;
    }
  }
  return out;
}

}  // namespace procdur
