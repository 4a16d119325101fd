#pragma once

#include <string>
#include <vector>

namespace procdur {

// Procedure category fed to the network as a one-hot input.
struct ProcedureType {
  int id;  // 1..5
  std::string label;
};

inline constexpr int kProcedureTypeCount = 5;

const std::vector<ProcedureType>& procedure_types();

bool valid_ptype(int id);

// One-hot encoding over the 5 categories; index id-1 is 1, rest 0.
std::vector<double> one_hot_type(int id);

}  // namespace procdur
