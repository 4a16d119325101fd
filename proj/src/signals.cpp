#include "procdur/signals.hpp"

#include <cmath>

#include "procdur/errors.hpp"

namespace procdur {

const std::vector<SignalSpec>& signal_registry() {
  static const std::vector<SignalSpec> kRegistry = {
      {"current_gas_flow", SignalKind::kContinuous, 0.0, 215.0, "insufflator"},
      {"target_gas_flow", SignalKind::kContinuous, 10.0, 300.0, "insufflator"},
      {"current_gas_pressure", SignalKind::kContinuous, 0.0, 255.0, "insufflator"},
      {"target_gas_pressure", SignalKind::kContinuous, 9.0, 23.0, "insufflator"},
      {"used_gas_volume", SignalKind::kContinuous, 0.0, 9501.0, "insufflator"},
      {"gas_supply_pressure", SignalKind::kContinuous, 0.0, 760.0, "insufflator"},
      {"insufflator_on", SignalKind::kBinary, 0.0, 1.0, "insufflator"},
      {"all_lights_off", SignalKind::kBinary, 0.0, 1.0, "or_lights"},
      {"or_light1_intensity", SignalKind::kContinuous, 0.0, 100.0, "or_lights"},
      {"or_light2_intensity", SignalKind::kContinuous, 0.0, 100.0, "or_lights"},
      {"endo_light_intensity", SignalKind::kContinuous, 0.0, 100.0, "endo_light"},
      {"white_balance_active", SignalKind::kBinary, 0.0, 1.0, "camera"},
      {"camera_gains", SignalKind::kContinuous, 0.0, 3298.0, "camera"},
      {"camera_exposure_index", SignalKind::kContinuous, 0.0, 834.0, "camera"},
  };
  return kRegistry;
}

int signal_index(const std::string& name) {
  const auto& reg = signal_registry();
  for (int i = 0; i < static_cast<int>(reg.size()); ++i) {
    if (reg[i].name == name) return i;
  }
  throw DataError("unknown signal identifier: " + name);
}

std::vector<double> normalize_device(std::span<const double> raw) {
  const auto& reg = signal_registry();
  if (raw.size() != reg.size()) {
    throw ShapeError("device vector has " + std::to_string(raw.size()) +
                     " values, expected " + std::to_string(reg.size()));
  }
  std::vector<double> out(reg.size());
  for (size_t k = 0; k < reg.size(); ++k) {
    if (!std::isfinite(raw[k])) {
      throw DataError("non-finite value for signal " + reg[k].name);
    }
    const double span = reg[k].range_max - reg[k].range_min;
    double v = (raw[k] - reg[k].range_min) / span;
    out[k] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
  return out;
}

double denormalize_signal(int index, double normalized) {
  const auto& spec = signal_registry().at(static_cast<size_t>(index));
  return spec.range_min + normalized * (spec.range_max - spec.range_min);
}

}  // namespace procdur
