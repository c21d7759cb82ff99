#pragma once

#include <stdexcept>
#include <string>

namespace vagnn {

// Error families. Each family maps to one process exit code in the CLI so
// scripts can distinguish bad input from bad state from bad arithmetic.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Shape or dimension disagreement between tensors, configs, or files.
class ShapeError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// Invalid configuration values (out-of-range hyperparameters, bad paths in config).
class ConfigError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// Structural problems in graph or dataset inputs (malformed publishing,
// empty graphs, walk endpoints outside the graph, split leakage).
class GraphError : public ValidationError {
public:
  using ValidationError::ValidationError;
};

// Filesystem and serialization failures, including truncated or corrupt files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Non-finite values produced where finite arithmetic is required.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitIo = 3,
  kExitNumeric = 4,
};

}  // namespace vagnn
