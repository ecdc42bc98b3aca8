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

#include "reigate/pulse_shapes.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace reigate {
namespace {

// 20-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr std::array<double, 10> kGlNodes = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
    0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
    0.9639719272779138, 0.9931285991850949};
constexpr std::array<double, 10> kGlWeights = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
    0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};

// Area of the unit-amplitude cut Gaussian,
//   D = int_0^{t_g} [exp(-(t - h)^2 / 2s^2) - exp(-h^2 / 2s^2)] dt,  h = t_g / 2.
// For h <~ s the two terms nearly cancel, so the integrand is rewritten as
// exp(-h^2/2s^2) * expm1((h^2 - u^2) / 2s^2) and integrated with Gauss-Legendre.
double unit_area(double t_g, double sigma) {
  const double h = 0.5 * t_g;
  const double a = h * h / (2.0 * sigma * sigma);
  if (h > sigma) {
    return sigma * std::sqrt(kTwoPi) * std::erf(h / (std::sqrt(2.0) * sigma)) -
           t_g * std::exp(-a);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      const double u = 0.5 * h * (1.0 + sign * kGlNodes[i]);
      sum += kGlWeights[i] * std::expm1((h * h - u * u) / (2.0 * sigma * sigma));
    }
  }
  // 2 * int_0^h, with the [0, h] -> [-1, 1] Jacobian h/2.
  return 2.0 * std::exp(-a) * 0.5 * h * sum;
}

}  // namespace

CutGaussianAmplitude solve_amplitude(const CutGaussianParams& p) {
  if (!(p.t_g_us > 0.0) || !(p.sigma_us > 0.0)) {
    throw ValidationError("cut Gaussian: t_g and sigma must be positive");
  }
  if (p.target_area == 0.0) return {0.0, 0.0};
  const double d = unit_area(p.t_g_us, p.sigma_us);
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw ValidationError("cut Gaussian: shape has no positive achievable area");
  }
  const double c1 = p.target_area / d;
  const double c2 = c1 * std::exp(-p.t_g_us * p.t_g_us / (8.0 * p.sigma_us * p.sigma_us));
  return {c1, c2};
}

CutGaussianParams CutGaussianParams::make(double t_g_us, double sigma_us, double target_area,
                                          double drag_alpha_y_s) {
  CutGaussianParams p;
  p.t_g_us = t_g_us;
  p.sigma_us = sigma_us;
  p.target_area = target_area;
  p.drag_alpha_y_s = drag_alpha_y_s;
  const auto amp = solve_amplitude(p);
  p.c1 = amp.c1;
  p.c2 = amp.c2;
  return p;
}

double eval_cut_gaussian(const CutGaussianParams& p, double t) {
  if (t < 0.0 || t > p.t_g_us) return 0.0;
  const double x = t - 0.5 * p.t_g_us;
  return p.c1 * std::exp(-x * x / (2.0 * p.sigma_us * p.sigma_us)) - p.c2;
}

double cut_gaussian_derivative(const CutGaussianParams& p, double t) {
  if (t < 0.0 || t > p.t_g_us) return 0.0;
  const double s2 = p.sigma_us * p.sigma_us;
  const double x = t - 0.5 * p.t_g_us;
  return -p.c1 * x / s2 * std::exp(-x * x / (2.0 * s2));
}

double drag_quadrature(const CutGaussianParams& p, double alpha_y_s, double t) {
  if (alpha_y_s == 0.0) return 0.0;
  // alpha in seconds -> microseconds so the product stays in rad/us.
  return seconds_to_us(alpha_y_s) * cut_gaussian_derivative(p, t);
}

SechscanParams SechscanParams::make(double t_g_us, double t_fwhm_us, double f_width_mhz,
                                    double f_scan_mhz, double omega0_mhz) {
  if (!(t_g_us > 0.0) || !(t_fwhm_us > 0.0) || !(f_width_mhz > 0.0)) {
    throw ValidationError("sechscan: t_g, t_fwhm and f_width must be positive");
  }
  if (f_scan_mhz < 0.0 || omega0_mhz < 0.0) {
    throw ValidationError("sechscan: f_scan and omega0 must be non-negative");
  }
  SechscanParams p;
  p.t_g_us = t_g_us;
  p.t_fwhm_us = t_fwhm_us;
  p.f_width_mhz = f_width_mhz;
  p.f_scan_mhz = f_scan_mhz;
  p.omega0_mhz = omega0_mhz;
  p.beta = 2.0 * std::log(1.0 + std::sqrt(2.0)) / t_fwhm_us;
  p.mu = kPi * f_width_mhz / p.beta;
  p.t_scan = kTwoPi * f_scan_mhz / (p.mu * p.beta * p.beta);
  if (p.t_scan > t_g_us) {
    throw ValidationError("sechscan: chirp duration t_scan exceeds t_g");
  }
  p.t0 = 0.5 * (t_g_us - p.t_scan);
  return p;
}

namespace {
// -ln(sech(x)) = ln(cosh(x)), evaluated without overflow.
double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}
double sech(double x) { return 1.0 / std::cosh(x); }
}  // namespace

SechscanSample eval_sechscan(const SechscanParams& p, double t) {
  if (t < 0.0 || t > p.t_g_us) return {0.0, 0.0};
  const double omega0 = p.peak_rabi();
  const double half_scan = 0.5 * kTwoPi * p.f_scan_mhz;
  if (t < p.t0) {
    const double x = p.beta * (t - p.t0);
    return {omega0 * sech(x), p.mu * log_cosh(x) - half_scan * t};
  }
  if (t <= p.t0 + p.t_scan) {
    const double u = t - p.t0;
    // t_scan == 0 never reaches here with u != 0.
    const double quad = p.t_scan > 0.0 ? u * u / p.t_scan : 0.0;
    return {omega0, half_scan * (-t + quad)};
  }
  const double x = p.beta * (t - p.t0 - p.t_scan);
  return {omega0 * sech(x), p.mu * log_cosh(x) + half_scan * (-p.t0 + (t - p.t0 - p.t_scan))};
}

double sechscan_frequency(const SechscanParams& p, double t) {
  if (t < 0.0 || t > p.t_g_us) return 0.0;
  const double mu_beta = p.mu * p.beta;
  double dphi = 0.0;
  if (t < p.t0) {
    dphi = mu_beta * std::tanh(p.beta * (t - p.t0)) - 0.5 * kTwoPi * p.f_scan_mhz;
  } else if (t <= p.t0 + p.t_scan) {
    dphi = 0.5 * kTwoPi * p.f_scan_mhz * (-1.0 + 2.0 * (t - p.t0) / p.t_scan);
  } else {
    dphi = mu_beta * std::tanh(p.beta * (t - p.t0 - p.t_scan)) + 0.5 * kTwoPi * p.f_scan_mhz;
  }
  return dphi / kTwoPi;
}

double envelope_duration(const Envelope& envelope) {
  return std::visit([](const auto& e) { return e.duration(); }, envelope);
}

Complex envelope_value(const Envelope& envelope, double t) {
  if (const auto* g = std::get_if<CutGaussianParams>(&envelope)) {
    return {eval_cut_gaussian(*g, t), drag_quadrature(*g, g->drag_alpha_y_s, t)};
  }
  const auto s = eval_sechscan(std::get<SechscanParams>(envelope), t);
  return std::polar(s.amplitude, -s.phase);
}

Tone make_tone(int ion, TransitionRef target, Envelope envelope, double phase,
               double detuning_mhz) {
  Tone t;
  t.ion = ion;
  t.target = std::move(target);
  t.envelope = std::move(envelope);
  t.phase = wrap_phase(phase);
  t.detuning_mhz = detuning_mhz;
  return t;
}

double segment_duration(const Segment& segment) {
  return std::visit([](const auto& s) { return s.duration_us; }, segment);
}

GateSchedule& GateSchedule::add_pulse(std::vector<Tone> tones, std::optional<double> duration_us) {
  double longest = 0.0;
  for (auto& tone : tones) {
    if (tone.ion < 0 || tone.ion > 1) throw ValidationError("tone: ion index must be 0 or 1");
    const double d = envelope_duration(tone.envelope);
    if (!(d > 0.0)) throw ValidationError("tone: envelope duration must be positive");
    longest = std::max(longest, d);
    const auto ion = static_cast<std::size_t>(tone.ion);
    if (!frame_level_[ion].empty() && tone.target.ground == frame_level_[ion]) {
      tone.phase += frame_phase_[ion];
    }
    tone.phase = wrap_phase(tone.phase);
  }
  const double duration = duration_us.value_or(longest);
  if (!(duration > 0.0)) throw ValidationError("pulse segment: duration must be positive");
  segments_.emplace_back(PulseSegment{std::move(tones), duration});
  return *this;
}

GateSchedule& GateSchedule::add_wait(double duration_us) {
  if (duration_us < 0.0) throw ValidationError("wait segment: duration must be non-negative");
  if (duration_us > 0.0) segments_.emplace_back(WaitSegment{duration_us});
  return *this;
}

GateSchedule& GateSchedule::append(const GateSchedule& other) {
  for (std::size_t i = 0; i < 2; ++i) {
    if (frame_level_[i].empty()) frame_level_[i] = other.frame_level_[i];
  }
  for (const auto& seg : other.segments_) {
    if (const auto* p = std::get_if<PulseSegment>(&seg)) {
      add_pulse(p->tones, p->duration_us);
    } else {
      add_wait(segment_duration(seg));
    }
  }
  return *this;
}

GateSchedule map_tones(const GateSchedule& schedule, const std::function<void(Tone&)>& edit) {
  GateSchedule out(schedule.target());
  for (const auto& seg : schedule.segments()) {
    if (const auto* p = std::get_if<PulseSegment>(&seg)) {
      std::vector<Tone> tones = p->tones;
      for (Tone& t : tones) edit(t);
      out.add_pulse(std::move(tones), p->duration_us);
    } else {
      out.add_wait(segment_duration(seg));
    }
  }
  return out;
}

double GateSchedule::total_duration() const {
  double total = 0.0;
  for (const auto& seg : segments_) total += segment_duration(seg);
  return total;
}

void GateSchedule::rotate_frame(int ion, double angle) {
  auto& p = frame_phase_[static_cast<std::size_t>(ion)];
  p = wrap_phase(p + angle);
}

void GateSchedule::set_frame_level(int ion, std::string q1_label) {
  frame_level_[static_cast<std::size_t>(ion)] = std::move(q1_label);
}

}  // namespace reigate
