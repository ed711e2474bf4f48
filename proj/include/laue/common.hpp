#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace laue {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Caller passed something malformed (wrong dimension, bad degree, bad flag).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A mathematical hypothesis of an operation does not hold for the input
// (non-stationary field, null normal, repulsive pair for an orbit, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Non-finite sample or failed solve inside a numeric kernel.
struct NumericFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Vec basis_vector(int n, int i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

}  // namespace laue
