#pragma once

#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "procdur/record.hpp"

namespace procdur {

// On-disk dataset: one procedure per UTF-8 file with LF line endings.
// Line 1 is a JSON header {format_version, id, ptype, n, channels}; lines
// 2..n+1 hold one frame each as {t, device, tools, img} with absent channels
// omitted. Device values are stored in raw units; normalization happens here
// at load time.
inline constexpr int kDatasetFormatVersion = 1;
inline constexpr const char* kProcedureFileExt = ".jsonl";

struct DatasetHeader {
  std::string id;
  int ptype = 0;
  int n = 0;
  Channels channels;
};

// Incremental reader so callers can consume frames as they arrive (the CLI
// streams predictions from it). Parsing is strict; any malformed line raises
// ParseError with source name and line number.
class ProcedureReader {
 public:
  ProcedureReader(std::istream& in, std::string source_name);
  const DatasetHeader& header() const { return header_; }
  // Next validated frame (device already normalized), or nullopt at a clean
  // end of input. Frame count and consecutiveness against the header are
  // enforced.
  std::optional<Frame> next();

 private:
  std::istream& in_;
  std::string source_;
  DatasetHeader header_;
  long line_no_ = 0;
  int frames_read_ = 0;
  bool done_ = false;
};

ProcedureRecord load_procedure_file(const std::filesystem::path& file);

// Loads a single procedure file or every *.jsonl file in a directory
// (lexicographic order). Every returned record satisfies the record
// invariants.
std::vector<ProcedureRecord> load_dataset(const std::filesystem::path& path);

void save_procedure_file(const ProcedureRecord& rec, const std::filesystem::path& file);

// Writes one <id>.jsonl per record into `dir` (created if missing).
void save_dataset(std::span<const ProcedureRecord> records,
                  const std::filesystem::path& dir);

}  // namespace procdur
