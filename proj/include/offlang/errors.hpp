#pragma once

#include <stdexcept>
#include <string>

namespace offlang {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files (TSV/CSV rows, artifact bytes).
struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Structurally valid input that violates a contract (unknown label,
// duplicate id, bad hyperparameter key, impossible split).
struct ValidationError : Error {
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Training could not complete (divergence, fold failure).
struct TrainingError : Error {
  explicit TrainingError(const std::string& msg) : Error(msg) {}
};

}  // namespace offlang
