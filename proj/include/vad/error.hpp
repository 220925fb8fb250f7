#pragma once

#include <stdexcept>
#include <string>

namespace vad {

// Input or dataset violates a documented invariant. CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Artifact and dataset disagree (dimensions, keypoint count, feature set). CLI exit code 3.
class CompatibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// AUROC requested on labels of a single class.
class SingleClassError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical breakdown (e.g. Cholesky failure after regularization).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vad
