#include "procdur/types.hpp"

#include "procdur/errors.hpp"

namespace procdur {

const std::vector<ProcedureType>& procedure_types() {
  static const std::vector<ProcedureType> kTypes = {
      {1, "Colorectal"},
      {2, "Upper Gastrointestinal and Bariatric"},
      {3, "Hepato-Pancreatico-Biliary"},
      {4, "General Laparoscopic"},
      {5, "Singular case"},
  };
  return kTypes;
}

bool valid_ptype(int id) { return id >= 1 && id <= kProcedureTypeCount; }

std::vector<double> one_hot_type(int id) {
  if (!valid_ptype(id)) {
    throw DataError("procedure type out of range: " + std::to_string(id));
  }
  std::vector<double> v(kProcedureTypeCount, 0.0);
  v[static_cast<size_t>(id - 1)] = 1.0;
  return v;
}

}  // namespace procdur
