#pragma once

#include <span>
#include <string>
#include <vector>

namespace procdur {

// One raw reading from a device stream, before resampling.
struct RawEvent {
  std::string signal;
  double timestamp = 0.0;  // seconds since procedure start
  double value = 0.0;
};

// Resamples raw device events to the 1 Hz grid t = 1..horizon.
//
// For each second t and signal s the output is the most recent value of s
// with timestamp <= t; when several values land inside (t-1, t] all but the
// latest are discarded, and a stale value is held indefinitely once seen.
// Before a signal's first event the output is the fill value: range_min for
// continuous signals, 0 for binary ones.
//
// Returns one row per registry signal, each of length `horizon`, in raw
// units. Throws DataError for unknown signal identifiers or timestamps that
// go backwards within a signal.
std::vector<std::vector<double>> resample_to_1hz(std::span<const RawEvent> events,
                                                 int horizon);

}  // namespace procdur
