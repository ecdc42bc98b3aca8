// Copyright 2026 The reigate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace reigate {

// Units used throughout the library: time in microseconds, frequency in MHz,
// angular frequency in rad/us. Coherence times in configs are in seconds.

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Seconds to microseconds.
inline constexpr double seconds_to_us(double s) { return s * 1.0e6; }

/// Wraps an angle into [0, 2pi).
double wrap_phase(double angle);

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: config parse failures, invariant violations, bad parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside a simulation (step underflow, invariant breach).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace reigate
