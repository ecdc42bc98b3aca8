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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reigate/common.hpp"
#include "reigate/ion_model.hpp"
#include "reigate/lindblad.hpp"
#include "reigate/pulse_shapes.hpp"

namespace reigate {

/// Optimized two-color pulse: t_g = 1.68 us, sigma = 4.16 us, area pi/sqrt(2).
CutGaussianParams default_sq_pulse();
/// Single-color control pulse: t'_g = 2.17 us, sigma' = 6.75 us, area pi.
CutGaussianParams default_control_pulse();

struct SqGateSpec {
  double phi = 0.0;    // phi_1 - phi_0
  double theta = 0.0;  // phase added to |B> relative to |D>
  CutGaussianParams pulse = default_sq_pulse();
};

/// Two two-color pulses on ion `ion`; the second pulse has both phases
/// advanced by pi - theta.
GateSchedule sq_schedule(const SqGateSpec& spec, const QubitAssignment& qubit = {}, int ion = 0);

/// Appends an SQ gate to `schedule` (current frame phases apply).
void append_sq_gate(GateSchedule& schedule, const SqGateSpec& spec,
                    const QubitAssignment& qubit = {}, int ion = 0);

/// e^{i theta}|B><B| + |D><D| in the (|0>, |1>) basis.
Matrix ideal_sq_unitary(double phi, double theta);

/// Bright state (|0> + e^{-i phi}|1>)/sqrt(2).
Vector bright_state(double phi);
Vector dark_state(double phi);

struct NamedGate {
  std::string name;
  double phi = 0.0;
  double theta = 0.0;
};

/// I, X, sqrt(X), sqrt(-X), sqrt(Y), sqrt(-Y) as (phi, theta) pairs.
const std::vector<NamedGate>& benchmark_gates();
std::optional<NamedGate> find_gate(std::string_view name);

/// Zero-duration z rotation: subsequent pulses addressing |q1> of `ion`
/// are shifted by `angle`. Equivalent to diag(1, e^{i angle}) applied to the
/// frame, so U(phi, theta) becomes U(phi + angle, theta).
GateSchedule virtual_z(GateSchedule schedule, double angle, int ion = 0);

/// Two-qubit gate: schedule plus the ideal unitary on {|00>,|01>,|10>,|11>}
/// (ion A is the most significant qubit).
struct TqGate {
  GateSchedule schedule;
  Matrix ideal;
};

struct BlockadeSpec {
  CutGaussianParams control = default_control_pulse();
  SqGateSpec target;
};

TqGate blockade_gate(const BlockadeSpec& spec, const QubitAssignment& qubit = {});

struct InteractionSpec {
  SechscanParams pulse;
  double wait_us = 0.0;
  /// Phase (rad) added to |q1> of ion A and B after the gate by a frame
  /// update; zero unless calibrated.
  double frame_correction[2] = {0.0, 0.0};
};

/// Default sechscan pulse, tuned for a 3 MHz shift.
SechscanParams default_sechscan();

TqGate interaction_gate(const InteractionSpec& spec, const QubitAssignment& qubit = {});

/// Wait that brings the |00> phase (relative to |01>) to pi, from one run of
/// the no-wait gate on |0>(|0> + |1>)/sqrt(2).
double calibrate_wait(const InteractionSpec& spec, const SimulationModel& model,
                      const IntegratorSettings& settings = {});

/// Wait for a measured phase: the |ee> branch accrues -2 pi dnu t, and the
/// returned t >= 0 is the shortest that turns `phi_d` into pi.
double wait_for_phase(double phi_d, double delta_nu_mhz);

/// Calibrates the wait and, when `frame_correction` is set, the |q1> frame
/// phases of both ions, from one run on (|0>+|1>)(|0>+|1>)/2.
InteractionSpec calibrate_interaction(InteractionSpec spec, const SimulationModel& model,
                                      bool frame_correction,
                                      const IntegratorSettings& settings = {});

/// Applies the frame correction of `spec` to a 2-ion state (a diagonal unitary).
Matrix apply_frame_correction(const Matrix& rho, const InteractionSpec& spec,
                              const SimulationModel& model);

/// Embeds a 2-level vector into the ion's level space.
Vector embed_qubit(const Vector& psi, const SimulationModel& model);
/// Embeds a 4-level two-qubit vector into the 36-level space.
Vector embed_two_qubit(const Vector& psi, const SimulationModel& model);

/// Level indices of the qubit subspace: {q0, q1} or {00, 01, 10, 11}.
std::vector<int> qubit_subspace(const SimulationModel& model);

}  // namespace reigate
