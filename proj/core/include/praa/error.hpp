#pragma once

#include <stdexcept>
#include <string>

namespace praa {

// Raised for malformed inputs: bad schema files, CSV parse failures, and
// datasets that violate the record model. Messages are prefixed with the
// module that raised them, e.g. "dataset: row 3: expected 5 fields".
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what) {}
};

// Raised for out-of-range configuration values (fold counts, swarm sizes).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace praa
