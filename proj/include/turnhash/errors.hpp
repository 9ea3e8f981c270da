#pragma once

#include <stdexcept>
#include <string>

namespace turnhash {

// Input data failed structural validation: malformed step function, invalid
// polygon, domain mismatch between operands. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A parameter precondition of a probabilistic structure is violated, e.g. the
// approximation factor is too small for the requested hash family. Maps to
// CLI exit code 3.
class ParamError : public std::runtime_error {
 public:
  explicit ParamError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace turnhash
