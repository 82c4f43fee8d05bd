#pragma once

#include <stdexcept>
#include <string>

namespace mdg {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SpaceMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct UnnormalizableTilt : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SupportViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IncompatibleSupports : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NormalizationDrift : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyClassSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyRestriction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EventOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mdg
