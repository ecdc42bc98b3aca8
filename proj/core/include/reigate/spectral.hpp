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

#include <limits>
#include <string>
#include <vector>

#include "reigate/common.hpp"
#include "reigate/gate_schemes.hpp"
#include "reigate/ion_model.hpp"
#include "reigate/lindblad.hpp"

namespace reigate {

/// Interval (MHz, relative to a qubit line) free of other ions' transitions.
/// Edges are +-infinity when nothing limits the window inside the span.
struct Window {
  double low = -std::numeric_limits<double>::infinity();
  double high = std::numeric_limits<double>::infinity();
  double width() const { return high - low; }
};

struct WindowReport {
  Window window_0;  // around |0> -> |e>
  Window window_1;  // around |1> -> |e>
};

/// Every ion in the inhomogeneous line is parked in the ground state whose
/// optical lines are farthest (min distance) from the two qubit lines; the
/// windows are the gaps left around each qubit line.
///
/// Ion offsets cover [-span/2, span/2] around the |0> -> |e> line. Ties
/// between ground states are broken in the order q0, q1, then the rest in
/// scheme order. The maximin choice is piecewise constant in the offset, so
/// the edges are computed exactly from the breakpoints instead of sampling.
WindowReport compute_transmission_windows(const LevelScheme& scheme, const QubitAssignment& qubit,
                                          double span_mhz = 3000.0);

enum class CrosstalkMode { Sequential, Parallel };

struct CrosstalkScanSpec {
  std::vector<double> detunings_mhz;  // Delta: offset of qubit B's lines from A's
  CrosstalkMode mode = CrosstalkMode::Sequential;
  /// Gate qubit A runs during B's gate in parallel mode (sequential: ignored).
  std::string idle_gate = "X";
  /// Also report the error of an A initialized in the aux level.
  bool aux = true;
  /// Skip the six qubit states (aux-only scans).
  bool qubit_states = true;
  /// Also simulate -Delta for the reverse perspective.
  bool reverse = true;
  CutGaussianParams pulse = default_sq_pulse();
  IntegratorSettings settings;
  int workers = 1;

  void validate() const;
};

struct CrosstalkPoint {
  double delta_mhz = 0.0;
  double mean_error = 0.0;  // additional error of A, averaged over 6 states x 6 B gates
  double std_error = 0.0;
  double aux_error = 0.0;   // mean over B gates, A starting in aux (A idle)
  /// Same pair seen from B: error on B from A's gates, i.e. the point at -Delta.
  double reverse_mean_error = 0.0;
};

/// Off-resonant driving of qubit A by SQ gates addressed at qubit B, whose
/// lines sit Delta above A's. Only the optical cross-driving is modeled; B
/// itself is not simulated (the ions share no dipole coupling here).
///
/// Additional error = error with B's tones minus the error of the same A
/// evolution without them (zero when A idles on a lossless model).
std::vector<CrosstalkPoint> crosstalk_scan(const SimulationModel& model_a,
                                           const CrosstalkScanSpec& spec);

/// Slope of log(errors) against log(|detunings|) by least squares.
double fit_scaling_exponent(const std::vector<double>& errors, const std::vector<double>& detunings);

struct SpectatorPenaltySpec {
  /// Spectator offsets (MHz) from each driven line.
  std::vector<double> detunings_mhz = {-11.0, -10.5, -10.0, -9.5, -9.0};
  IntegratorSettings settings;
  int workers = 1;

  void validate() const;
  static SpectatorPenaltySpec grid(double lo, double hi, int points);
};

struct SpectatorPenalty {
  double penalty = 0.0;                  // mean over lines and offsets
  std::vector<double> per_detuning;      // mean over driven lines at each offset
};

/// A lossless spectator ion of the same scheme, offset by delta from each line
/// a tone drives and starting in that line's ground level, runs the whole
/// schedule (the tones of the driven line's ion). Penalty = mean population
/// that leaves the starting level.
SpectatorPenalty spectator_penalty(const GateSchedule& schedule, const SpectatorPenaltySpec& spec,
                                   const LevelScheme& scheme);

}  // namespace reigate
