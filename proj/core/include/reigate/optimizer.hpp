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
#include <vector>

#include "reigate/gate_schemes.hpp"
#include "reigate/metrics.hpp"
#include "reigate/spectral.hpp"

namespace reigate {

using Params = std::vector<double>;
using Evaluator = std::function<double(const Params&)>;

/// Score = gate term + ISD term (equal weights). The ISD term is optional.
struct ObjectiveSpec {
  std::vector<std::string> names;
  Evaluator gate_term;
  Evaluator isd_term;  // empty when unused

  bool dual() const { return static_cast<bool>(isd_term); }
  void validate() const;
};

double score(const ObjectiveSpec& objective, const Params& params);

struct ParamBound {
  double lo = 0.0;
  double hi = 0.0;  // lo == hi pins the parameter
};

struct SearchSpec {
  std::vector<ParamBound> bounds;
  int n_starts = 32;
  int local_max_iters = 500;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;  // on the absolute score spread of the simplex
  /// Optional first start (e.g. a manual guess); the rest are quasi-random.
  Params initial;
  int workers = 1;

  void validate() const;
};

struct TraceEntry {
  int start = 0;
  Params params;
  double score = 0.0;  // +inf when the evaluation threw
  bool failed = false;
};

struct OptimizeResult {
  Params params;
  double score = 0.0;
  std::vector<TraceEntry> trace;
  std::vector<Params> starts;
};

/// Halton starts inside the bounds (shifted by a seeded random offset), each
/// refined by a Nelder-Mead simplex in bound-normalized coordinates.
/// Starts are independent and may run in parallel; the trace is ordered by
/// start, then by evaluation.
OptimizeResult optimize(const ObjectiveSpec& objective, const SearchSpec& search);

/// Low-discrepancy points in [0,1)^dim with a Cranley-Patterson shift drawn
/// from `seed`.
std::vector<Params> halton_points(int count, int dim, std::uint64_t seed);

// -- SQ gate objective ------------------------------------------------------

/// Parameters: t_g (us), sigma (us) and, with `drag`, alpha_y in units of
/// 1e-9 s. Pulse area stays pi/sqrt(2).
struct SqObjectiveOptions {
  bool drag = false;
  bool isd = true;
  AveragingOptions averaging;
  SpectatorPenaltySpec spectator;
};

ObjectiveSpec sq_objective(const SimulationModel& model, const SqObjectiveOptions& options);
CutGaussianParams sq_pulse_from(const Params& p, bool drag);

// -- interaction gate objective ---------------------------------------------

/// Parameters: t_g (us), t_fwhm (us), f_width (MHz), f_scan (MHz), Omega_0 (MHz).
/// The wait (and optional frame correction) is calibrated at every point.
struct InteractionObjectiveOptions {
  bool isd = true;
  bool frame_correction = false;
  /// Two-qubit inputs for the gate term; empty means the full 36-state set.
  std::vector<Vector> states;
  IntegratorSettings settings;
  SpectatorPenaltySpec spectator;
};

SechscanParams sechscan_from(const Params& p);
ObjectiveSpec interaction_objective(const SimulationModel& model,
                                    const InteractionObjectiveOptions& options);

/// Reduced input for interaction-gate searches: (|0>+|1>)(|0>+|1>)/2, which
/// sees all four branch phases and any leakage.
std::vector<Vector> interaction_search_states();

struct ShiftOptimum {
  double shift_mhz = 0.0;
  SechscanParams pulse;
  InteractionSpec gate;      // calibrated
  double search_score = 0.0;
  double gate_error = 0.0;   // full 36-state average
  double gate_error_std = 0.0;
  double isd_penalty = 0.0;
  int evaluations = 0;
};

/// Optimizes the sechscan pulse separately for every dipole shift and
/// reports the full-average gate error of each optimum.
std::vector<ShiftOptimum> optimize_interaction_per_shift(const LevelScheme& scheme,
                                                         const QubitAssignment& qubit,
                                                         const std::vector<double>& shifts_mhz,
                                                         const SearchSpec& search,
                                                         const InteractionObjectiveOptions& options);

}  // namespace reigate
