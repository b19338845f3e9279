#pragma once

#include <stdexcept>
#include <string>

namespace gm3 {

// Invalid vehicle layout, control limits, script or config file contents.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// 1 + kappa fell below the guard; only raised when the caller asks for
// strict slip evaluation.
class SlipDegeneracyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A model returned a non-finite derivative.
class IntegrationFault : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnknownModelError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Annotation, trajectory or metric input that cannot be processed.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gm3
