// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cobeam {

using Real = double;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Error raised when a problem instance (or subproblem) admits no feasible
/// point. Infeasible instances are reported, never repaired.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error raised when every randomization candidate fails the feasibility
/// rescaling step.
class RandomizationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Error raised when an iterative solver cannot reach the requested
/// accuracy and no usable fallback iterate exists.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cobeam
