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

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reigate/common.hpp"

namespace reigate {

/// Cut Gaussian envelope
///
///   Omega(t) = c1 * exp(-(t - t_g/2)^2 / (2 sigma^2)) - c2,  0 <= t <= t_g
///
/// with c2 pinning both endpoints to zero and c1 fixing the pulse area.
/// Build instances with `make`, which solves for c1 and c2.
struct CutGaussianParams {
  double t_g_us = 0.0;
  double sigma_us = 0.0;
  double target_area = 0.0;  // rad
  /// DRAG quadrature scale in seconds: Omega_off = alpha_y * dOmega/dt.
  double drag_alpha_y_s = 0.0;
  double c1 = 0.0;  // rad/us
  double c2 = 0.0;  // rad/us

  static CutGaussianParams make(double t_g_us, double sigma_us, double target_area,
                                double drag_alpha_y_s = 0.0);
  double duration() const { return t_g_us; }
};

/// Amplitude constants for a cut Gaussian with the given area. Throws if the
/// shape cannot carry a positive area (t_g or sigma non-positive).
struct CutGaussianAmplitude {
  double c1;
  double c2;
};
CutGaussianAmplitude solve_amplitude(const CutGaussianParams& params);

/// In-phase Rabi amplitude (rad/us) at local time t; zero outside [0, t_g].
double eval_cut_gaussian(const CutGaussianParams& params, double t_us);
/// Analytic time derivative of eval_cut_gaussian (rad/us^2).
double cut_gaussian_derivative(const CutGaussianParams& params, double t_us);
/// DRAG off-quadrature amplitude alpha_y * dOmega/dt (rad/us).
double drag_quadrature(const CutGaussianParams& params, double alpha_y_s, double t_us);

/// Hyperbolic-square-hyperbolic ("sechscan") chirped pulse: sech edges with a
/// linear chirp across a flat-top plateau of length t_scan.
struct SechscanParams {
  double t_g_us = 0.0;
  double t_fwhm_us = 0.0;
  double f_width_mhz = 0.0;
  double f_scan_mhz = 0.0;
  double omega0_mhz = 0.0;  // peak Rabi frequency Omega_0 / 2pi
  // derived
  double beta = 0.0;    // 1/us
  double mu = 0.0;      // dimensionless
  double t_scan = 0.0;  // us
  double t0 = 0.0;      // us

  /// Derives beta, mu, t_scan, t0. Throws if t_scan > t_g or inputs are
  /// non-positive.
  static SechscanParams make(double t_g_us, double t_fwhm_us, double f_width_mhz,
                             double f_scan_mhz, double omega0_mhz);
  double duration() const { return t_g_us; }
  double peak_rabi() const { return kTwoPi * omega0_mhz; }
};

struct SechscanSample {
  double amplitude;  // |Omega(t)|, rad/us
  double phase;      // phi(t), rad; the drive is |Omega| exp(-i phi)
};

SechscanSample eval_sechscan(const SechscanParams& params, double t_us);
/// Instantaneous frequency nu(t) = (1/2pi) dphi/dt in MHz.
double sechscan_frequency(const SechscanParams& params, double t_us);

using Envelope = std::variant<CutGaussianParams, SechscanParams>;

double envelope_duration(const Envelope& envelope);

/// Complex drive value (rad/us) of an envelope at local time t, excluding the
/// tone's carrier phase: cut Gaussian gives Omega + i*Omega_off, sechscan
/// gives |Omega| exp(-i phi).
Complex envelope_value(const Envelope& envelope, double t_us);

/// Optical transition addressed by a tone.
struct TransitionRef {
  std::string ground;
  std::string excited;
  bool operator==(const TransitionRef&) const = default;
};

/// One drive component.
///
/// The tone frequency is the target transition frequency of the simulated
/// ion plus `detuning_mhz`. Its Rabi frequency on the target transition is
/// the envelope amplitude times `rabi_scale` when the target oscillator
/// strength equals `reference_strength` (defaults to the simulated value).
/// On any other transition (g, e) the amplitude scales by
/// sqrt(f(g, e) / reference_strength).
struct Tone {
  int ion = 0;
  TransitionRef target;
  double detuning_mhz = 0.0;
  double phase = 0.0;  // rad, kept in [0, 2pi)
  Envelope envelope;
  double rabi_scale = 1.0;
  std::optional<double> reference_strength;
};

Tone make_tone(int ion, TransitionRef target, Envelope envelope, double phase = 0.0,
               double detuning_mhz = 0.0);

struct PulseSegment {
  std::vector<Tone> tones;
  double duration_us = 0.0;
};

struct WaitSegment {
  double duration_us = 0.0;
};

using Segment = std::variant<PulseSegment, WaitSegment>;

enum class TargetIon { A, B, Both };

/// Ordered pulse and wait segments.
///
/// `frame_phase` holds pending virtual-z frame rotations per ion; they are
/// added to the |q1>-addressing tones of pulses appended afterwards.
class GateSchedule {
 public:
  GateSchedule() = default;
  explicit GateSchedule(TargetIon target) : target_(target) {}

  /// Appends a pulse; duration defaults to the longest tone envelope.
  GateSchedule& add_pulse(std::vector<Tone> tones, std::optional<double> duration_us = {});
  GateSchedule& add_wait(double duration_us);
  /// Appends all segments of another schedule; this schedule's frame phases
  /// apply to the appended pulses.
  GateSchedule& append(const GateSchedule& other);

  const std::vector<Segment>& segments() const { return segments_; }
  TargetIon target() const { return target_; }
  void set_target(TargetIon t) { target_ = t; }
  double total_duration() const;

  double frame_phase(int ion) const { return frame_phase_[static_cast<std::size_t>(ion)]; }
  void rotate_frame(int ion, double angle);
  /// Labels of the |q1> level per ion used when applying frame phases.
  void set_frame_level(int ion, std::string q1_label);

 private:
  std::vector<Segment> segments_;
  TargetIon target_ = TargetIon::A;
  double frame_phase_[2] = {0.0, 0.0};
  std::string frame_level_[2];
};

double segment_duration(const Segment& segment);

/// Copy of `schedule` with `edit` applied to every tone (frame phases already
/// folded into the tones are kept; pending frame rotations are not).
GateSchedule map_tones(const GateSchedule& schedule, const std::function<void(Tone&)>& edit);

}  // namespace reigate
