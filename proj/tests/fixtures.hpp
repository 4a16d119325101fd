#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "procdur/record.hpp"

namespace testfix {

// Unique writable directory under the system temp root; wiped if it
// already exists.
std::filesystem::path fresh_dir(const std::string& name);

// Small valid record with pseudo-random channel content.
procdur::ProcedureRecord tiny_record(const std::string& id, int ptype, int n,
                                     int d_img, unsigned seed);

// Writes the ten corrupted-file fixtures (eight dataset files, two
// checkpoints) into `dir` and returns their paths. Loading any of them
// must raise a structured error.
struct CorruptFixture {
  std::filesystem::path path;
  bool is_checkpoint = false;
  std::string what;
};
std::vector<CorruptFixture> corrupted_fixtures(const std::filesystem::path& dir);

}  // namespace testfix
