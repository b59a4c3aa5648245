// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mpc {

// Base class for every error the library throws.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

struct ZeroMean : Error {
  using Error::Error;
};

// Inputs degenerate for fitting (e.g. all abscissae identical).
struct DegenerateInputs : Error {
  using Error::Error;
};

// Data degenerate for initialization (e.g. all points identical).
struct DegenerateData : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct NonFiniteObjective : Error {
  NonFiniteObjective(const std::string& msg, std::vector<double> trace)
      : Error(msg), partial_trace(std::move(trace)) {}
  explicit NonFiniteObjective(const std::string& msg) : Error(msg) {}
  // Objective values recorded before the failure, for diagnostics output.
  std::vector<double> partial_trace;
};

struct IoError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, int row, int col)
      : Error(msg), row(row), col(col) {}
  explicit ParseError(const std::string& msg) : Error(msg), row(0), col(0) {}
  int row;  // 1-based, 0 when unknown
  int col;  // 1-based, 0 when unknown
};

struct RaggedRows : Error {
  using Error::Error;
};

struct SingularMetric : Error {
  using Error::Error;
};

struct NonFinite : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

}  // namespace mpc
