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
#include <string>
#include <vector>

#include "reigate/gate_schemes.hpp"
#include "reigate/metrics.hpp"

namespace reigate {

/// Static parameter errors of one experiment. Deviations are maxima of
/// uniform draws on [-max, max].
struct PerturbationSpec {
  double rabi_scale[2] = {1.0, 1.0};  // on tones addressing |q0> and |q1>
  double osc_strength_max_dev = 0.0;  // absolute, per matrix entry
  double splitting_max_dev_khz = 0.0; // per adjacent hyperfine splitting
  int n_draws = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class RetuneMode { Blind, Retuned };

struct RetunePolicy {
  RetuneMode mode = RetuneMode::Retuned;
  double rabi_residual = 0.005;  // +- fraction
  double freq_residual_khz = 1.0;

  void validate() const;
};

/// Adds uniform deviations to a scheme: every oscillator strength (clipped
/// to [0, 1], not renormalized) and every adjacent splitting within each
/// manifold, independently. The |q0> and |e> levels stay put, so the
/// |0> -> |e> line defines the ion's optical frequency.
LevelScheme perturb_scheme(const LevelScheme& nominal, const QubitAssignment& qubit,
                           double osc_max_dev, double splitting_max_dev_khz,
                           std::uint64_t seed, std::uint64_t draw);

/// Tones aimed at `truth` by someone who knows `nominal` (blind) or
/// `truth` up to the policy's residuals (retuned). Residuals are drawn per
/// distinct (ion, transition) from (seed, draw).
GateSchedule adapt_schedule(const GateSchedule& schedule, const LevelScheme& nominal,
                            const LevelScheme& truth, const RetunePolicy& policy,
                            const double rabi_scale[2], const QubitAssignment& qubit,
                            std::uint64_t seed, std::uint64_t draw);

struct RabiGridPoint {
  double s0 = 1.0;
  double s1 = 1.0;
  double error = 0.0;
};

/// SQ average error (6 states x 6 gates) with the |q0> and |q1> tones scaled
/// by s0 and s1.
std::vector<RabiGridPoint> rabi_scale_grid(const SimulationModel& model, const CutGaussianParams& pulse,
                                           const std::vector<std::pair<double, double>>& grid,
                                           const AveragingOptions& options = {});

enum class PerturbationAxis { OscillatorStrength, Splitting, Both };

struct ScanDraw {
  double axis_value = 0.0;
  int draw = 0;
  double error = 0.0;
};

struct ScanPoint {
  double axis_value = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;  // sample std of the draws
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::vector<ScanDraw> draws;
};

/// For each axis value v, n_draws perturbed systems with max deviation v on
/// the chosen axis (Both: v is the oscillator-strength deviation and
/// splitting_max_dev_khz scales with it as v * spec.splitting_max_dev_khz /
/// spec.osc_strength_max_dev). Draw k uses the same random numbers at every
/// axis value and in both modes.
ScanResult randomized_param_scan(const SimulationModel& model, const CutGaussianParams& pulse,
                                 const PerturbationSpec& spec, const RetunePolicy& policy,
                                 PerturbationAxis axis, const std::vector<double>& axis_values,
                                 const AveragingOptions& options = {});

struct TqUncertaintyPoint {
  double shift_mhz = 0.0;
  double blockade_mean = 0.0;
  double blockade_std = 0.0;
  double interaction_mean = 0.0;
  double interaction_std = 0.0;
  std::vector<double> blockade_draws;
  std::vector<double> interaction_draws;
};

/// Blockade spec whose target gate is X (a CNOT).
inline BlockadeSpec cnot_blockade() {
  BlockadeSpec b;
  b.target.theta = kPi;
  return b;
}

struct TqUncertaintyOptions {
  BlockadeSpec blockade = cnot_blockade();
  SechscanParams interaction_pulse = default_sechscan();
  IntegratorSettings settings;
  int workers = 1;
};

/// Blockade CNOT on (|0>+|1>)(|0>+i|1>)/2 and the interaction gate on
/// (|0>+|1>)(|0>+|1>)/2, both ions sharing one perturbed scheme per draw.
/// The interaction wait is calibrated on the nominal model.
std::vector<TqUncertaintyPoint> tq_uncertainty_scan(const LevelScheme& scheme, const QubitAssignment& qubit,
                                                    const std::vector<double>& shifts_mhz,
                                                    const PerturbationSpec& spec,
                                                    const RetunePolicy& policy,
                                                    const TqUncertaintyOptions& options = {});

}  // namespace reigate
