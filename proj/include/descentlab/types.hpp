#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace descentlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract arguments (dimensions, non-finite entries, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Rejected solver or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class NotSeparableError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary input (IDX files).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Weights over the original coordinates plus the coordinates the fit was
/// allowed to use. Inactive coordinates always hold zero.
struct LinearPredictor {
  Vector weights;
  std::vector<Index> active;

  [[nodiscard]] double predict(const Vector& x) const { return weights.dot(x); }
  [[nodiscard]] Vector predict_rows(const Matrix& x) const { return x * weights; }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace descentlab
