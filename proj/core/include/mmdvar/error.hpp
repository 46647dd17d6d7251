#pragma once

#include <stdexcept>
#include <string>

namespace mmdvar {

/// Malformed input: unparsable data, invalid kernel parameters, bad
/// configuration values.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates an estimator's requirements (sample
/// size too small, mismatched sample shapes, degenerate data).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mmdvar
