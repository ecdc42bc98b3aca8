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

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "reigate/gate_schemes.hpp"
#include "reigate/lindblad.hpp"

namespace reigate {

struct ErrorSample {
  std::string state;
  std::string gate;
  double error = 0.0;
};

struct ErrorReport {
  double mean_error = 0.0;
  double std_error = 0.0;  // sample standard deviation of the errors
  std::vector<ErrorSample> samples;

  static ErrorReport from_samples(std::vector<ErrorSample> samples);
};

/// 1 - <psi|rho|psi>. Values within 1e-12 outside [0, 1] are clipped.
double state_error(const Matrix& rho, const Vector& target);

struct NamedState {
  std::string name;
  Vector psi;
};

/// |0>, |1>, (|0> +- |1>)/sqrt2, (|0> +- i|1>)/sqrt2.
const std::vector<NamedState>& bowdrey_states();

/// |a> (x) |b>, ion A most significant.
Vector product_state(const Vector& a, const Vector& b);

struct AveragingOptions {
  IntegratorSettings settings;
  /// Indices into bowdrey_states() / benchmark_gates(); empty means all.
  std::vector<int> states;
  std::vector<int> gates;
  int workers = 1;
};

ErrorReport average_sq_error(const SimulationModel& model, const CutGaussianParams& pulse,
                             const AveragingOptions& options = {});
ErrorReport average_sq_error(const SimulationModel& model, const CutGaussianParams& pulse,
                             const ErrorSourceMask& mask, const AveragingOptions& options = {});

/// Same average with a caller-built schedule per benchmark gate (e.g. with
/// detuned or rescaled tones). The target is still the ideal gate.
using SqScheduleFactory = std::function<GateSchedule(const NamedGate&)>;
ErrorReport average_sq_error(const SimulationModel& model, const SqScheduleFactory& make,
                             const AveragingOptions& options = {});

using TqGateSpec = std::variant<BlockadeSpec, InteractionSpec>;

/// Product initial states (each qubit from the Bowdrey set). The blockade
/// additionally averages over the benchmark gates on the target; the
/// interaction gate uses the wait (and frame correction) stored in the spec.
ErrorReport average_tq_error(const SimulationModel& model, const TqGateSpec& spec,
                             const AveragingOptions& options = {});

/// Error of one TQ gate on explicit two-qubit initial states.
std::vector<double> tq_state_errors(const SimulationModel& model, const TqGate& gate,
                                    const std::vector<Vector>& inputs,
                                    const IntegratorSettings& settings,
                                    const InteractionSpec* frame = nullptr);

struct BenchmarkOptions {
  int n_gates = 1000;
  int repeats = 100;
  std::uint64_t seed = 1;
  IntegratorSettings settings;
  /// Samples of the relative phase used to interpolate the pulse channel.
  int phase_samples = 16;
  int workers = 1;
};

struct BenchmarkResult {
  std::vector<double> epsilon_mean;  // index n-1 holds epsilon_n
  std::vector<double> epsilon_std;
  std::vector<std::vector<double>> per_repeat;
  double fitted_p = 0.0;
  int repeats = 0;
};

/// Channel of one two-color SQ pulse as a function of tone phases and start
/// time, built from a handful of direct simulations.
class SqPulseChannel {
 public:
  SqPulseChannel(const SimulationModel& model, const CutGaussianParams& pulse,
                 const IntegratorSettings& settings, int phase_samples = 16);

  /// Applies a pulse with tone phases (phase0, phase1) starting at tau_us to
  /// the column-major vec of a density matrix.
  void apply(Vector& vec_rho, double phase0, double phase1, double tau_us) const;

  double pulse_duration() const { return duration_; }
  int dim() const { return d_; }
  /// Largest dropped Fourier coefficient (interpolation error indicator).
  double truncation() const { return truncation_; }

 private:
  int d_ = 0;
  double duration_ = 0.0;
  double nu0_ = 0.0;  // tone frequencies (MHz) in the level frame
  double nu1_ = 0.0;
  int q1_ = 0;
  std::vector<double> energies_;  // level energies (MHz)
  std::vector<bool> excited_;
  std::vector<int> harmonics_;
  std::vector<Matrix> coefficients_;
  double truncation_ = 0.0;
};

/// Random SQ gates with phi in [0, 2pi), theta in [0, pi]; each repeat starts
/// in Bowdrey state (repeat mod 6).
BenchmarkResult run_benchmark(const SimulationModel& model, const CutGaussianParams& pulse,
                              const BenchmarkOptions& options = {});

/// epsilon_n = (1 - (1 - 2p)^n) / 2.
double closed_form_epsilon(double p, int n);
/// Least-squares fit of the closed form over p in [0, 0.5].
double fit_error_rate(const std::vector<double>& epsilon_n);

}  // namespace reigate
