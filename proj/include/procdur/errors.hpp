#pragma once

#include <stdexcept>
#include <string>

namespace procdur {

// Base of every failure this library raises. `code` is a stable short tag
// the CLI prints in its one-line error output.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Malformed input file. Message is "<file>:<line>: <reason>".
class ParseError : public Error {
 public:
  ParseError(std::string file, long line, const std::string& reason)
      : Error("parse", file + ":" + std::to_string(line) + ": " + reason),
        file_(std::move(file)),
        line_(line) {}
  const std::string& file() const noexcept { return file_; }
  long line() const noexcept { return line_; }

 private:
  std::string file_;
  long line_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

// Invalid in-memory data (range, dimension, or invariant violations).
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error("data", msg) {}
};

// Tensor/vector shape mismatch inside the numeric core.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& msg) : Error("shape", msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

class TrainError : public Error {
 public:
  explicit TrainError(const std::string& msg) : Error("train", msg) {}
};

}  // namespace procdur
