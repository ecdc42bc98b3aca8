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
#include "reigate/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "reigate/metrics.hpp"
#include "reigate/parallel.hpp"

namespace reigate {

namespace {

// Preference order of ground levels for ties: q0, q1, rest.
std::vector<int> ground_order(const LevelScheme& scheme, const QubitLevels& lv) {
  std::vector<int> order{lv.q0_ground, lv.q1_ground};
  for (int g = 0; g < scheme.num_ground(); ++g) {
    if (g != lv.q0_ground && g != lv.q1_ground) order.push_back(g);
  }
  return order;
}

}  // namespace

WindowReport compute_transmission_windows(const LevelScheme& scheme, const QubitAssignment& qubit,
                                          double span_mhz) {
  scheme.validate();
  if (!(span_mhz > 0.0) || !std::isfinite(span_mhz)) {
    throw ValidationError("windows: span must be positive and finite");
  }
  const QubitLevels lv = resolve(scheme, qubit);
  const double ref = scheme.transition_mhz(lv.q0_ground, lv.e_excited);
  const double q[2] = {0.0, scheme.transition_mhz(lv.q1_ground, lv.e_excited) - ref};

  const int ng = scheme.num_ground();
  const int ne = scheme.num_excited();
  // lines of ground g for an ion at offset x: x + rel[g][j]
  std::vector<std::vector<double>> rel(static_cast<std::size_t>(ng));
  for (int g = 0; g < ng; ++g) {
    for (int e = 0; e < ne; ++e) rel[g].push_back(scheme.transition_mhz(g, e) - ref);
  }
  auto dist = [&](int g, double x) {
    double d = std::numeric_limits<double>::infinity();
    for (double t : rel[g]) {
      for (double qk : q) d = std::min(d, std::abs(x + t - qk));
    }
    return d;
  };

  // Every d_g is piecewise linear with slopes +-1; kinks sit at x = q - t and
  // crossings of two pieces at (q + q' - t - t') / 2.
  const double x_lo = -0.5 * span_mhz;
  const double x_hi = 0.5 * span_mhz;
  std::vector<double> pts{x_lo, x_hi};
  std::vector<double> all_t;
  for (const auto& r : rel) all_t.insert(all_t.end(), r.begin(), r.end());
  for (double t : all_t) {
    for (double qk : q) pts.push_back(qk - t);
  }
  for (std::size_t a = 0; a < all_t.size(); ++a) {
    for (std::size_t b = a; b < all_t.size(); ++b) {
      for (double qa : q) {
        for (double qb : q) pts.push_back(0.5 * (qa + qb - all_t[a] - all_t[b]));
      }
    }
  }
  std::erase_if(pts, [&](double x) { return x < x_lo || x > x_hi; });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const auto order = ground_order(scheme, lv);
  WindowReport report;
  Window* win[2] = {&report.window_0, &report.window_1};
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    if (b - a < 1e-12) continue;
    const double mid = 0.5 * (a + b);
    int best = order.front();
    double best_d = dist(best, mid);
    for (int g : order) {
      const double d = dist(g, mid);
      if (d > best_d + 1e-9) {
        best = g;
        best_d = d;
      }
    }
    // the chosen lines sweep [a + t, b + t] over this interval
    for (double t : rel[best]) {
      for (int w = 0; w < 2; ++w) {
        const double lo = a + t - q[w];
        const double hi = b + t - q[w];
        if (lo < 0.0 && hi > 0.0) {
          throw ValidationError("windows: a parked ion sits on a qubit line (zero-width window)");
        }
        if (hi <= 0.0) win[w]->low = std::max(win[w]->low, hi);
        if (lo >= 0.0) win[w]->high = std::min(win[w]->high, lo);
      }
    }
  }
  for (Window* w : win) {
    if (!(w->low < 0.0 && w->high > 0.0)) throw ValidationError("windows: zero-width window");
  }
  return report;
}

void CrosstalkScanSpec::validate() const {
  if (detunings_mhz.empty()) throw ValidationError("crosstalk: detuning grid is empty");
  for (double d : detunings_mhz) {
    if (!std::isfinite(d)) throw ValidationError("crosstalk: non-finite detuning");
  }
  if (!aux && !qubit_states) throw ValidationError("crosstalk: nothing to simulate");
  if (mode == CrosstalkMode::Parallel && !find_gate(idle_gate)) {
    throw ValidationError("crosstalk: parallel mode needs a known gate for qubit A, got '" +
                          idle_gate + "'");
  }
  settings.validate();
}

namespace {

// Tones of `extra` (shifted by delta) merged into the pulses of `base`;
// both schedules must have the same segment layout.
GateSchedule merge_detuned(const GateSchedule& base, const GateSchedule& extra, double delta) {
  if (!base.segments().empty() && base.segments().size() != extra.segments().size()) {
    throw ValidationError("crosstalk: schedules do not line up");
  }
  GateSchedule out;
  for (std::size_t k = 0; k < extra.segments().size(); ++k) {
    const auto& seg = std::get<PulseSegment>(extra.segments()[k]);
    std::vector<Tone> tones;
    if (!base.segments().empty()) tones = std::get<PulseSegment>(base.segments()[k]).tones;
    for (Tone t : seg.tones) {
      t.ion = 0;
      t.detuning_mhz += delta;
      tones.push_back(std::move(t));
    }
    out.add_pulse(std::move(tones), seg.duration_us);
  }
  return out;
}

// Errors 1 - <t|rho|t> of each input after the schedule.
std::vector<double> run_errors(const SimulationModel& model, const GateSchedule& schedule,
                               const std::vector<Vector>& inputs, const std::vector<Vector>& targets,
                               const IntegratorSettings& settings) {
  const Propagator prop(model, schedule, settings);
  std::vector<double> err(inputs.size());
  if (!prop.has_dissipation()) {
    Matrix cols(model.dimension(), static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t k = 0; k < inputs.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = inputs[k];
    const Matrix out = prop.evolve_pure(cols);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      const Vector psi = out.col(static_cast<Eigen::Index>(k));
      err[k] = state_error(psi * psi.adjoint(), targets[k]);
    }
    return err;
  }
  std::vector<Matrix> batch;
  for (const auto& v : inputs) batch.push_back(v * v.adjoint());
  const auto out = prop.evolve(batch);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    check_density_matrix(out[k], settings.rel_tol, "crosstalk output");
    err[k] = state_error(out[k], targets[k]);
  }
  return err;
}

}  // namespace

std::vector<CrosstalkPoint> crosstalk_scan(const SimulationModel& model_a,
                                           const CrosstalkScanSpec& spec) {
  spec.validate();
  if (model_a.num_ions() != 1) throw ValidationError("crosstalk: single-ion model of A required");
  const QubitAssignment& qubit = model_a.ion(0).qubit;
  const bool parallel = spec.mode == CrosstalkMode::Parallel;

  // A's own evolution and the ideal outcome
  GateSchedule a_sched;
  Matrix a_unitary = Matrix::Identity(2, 2);
  if (parallel) {
    const NamedGate g = *find_gate(spec.idle_gate);
    a_sched = sq_schedule({g.phi, g.theta, spec.pulse}, qubit, 0);
    a_unitary = ideal_sq_unitary(g.phi, g.theta);
  }
  std::vector<Vector> inputs;
  std::vector<Vector> targets;
  for (const auto& s : bowdrey_states()) {
    inputs.push_back(embed_qubit(s.psi, model_a));
    targets.push_back(embed_qubit(a_unitary * s.psi, model_a));
  }
  const bool want_aux = spec.aux;
  const Vector aux = Vector::Unit(model_a.dimension(), model_a.ion(0).levels.aux);

  // reference errors without B's tones
  std::vector<double> ref(inputs.size(), 0.0);
  double aux_ref = 0.0;
  {
    GateSchedule idle;
    idle.add_wait(2.0 * spec.pulse.duration());
    const GateSchedule& base = parallel ? a_sched : idle;
    if (spec.qubit_states) ref = run_errors(model_a, base, inputs, targets, spec.settings);
    if (want_aux) aux_ref = run_errors(model_a, idle, {aux}, {aux}, spec.settings).front();
  }

  // both signs of every detuning, each simulated once
  std::set<double> grid;
  for (double d : spec.detunings_mhz) {
    grid.insert(d);
    if (spec.reverse) grid.insert(-d);
  }
  const std::vector<double> deltas(grid.begin(), grid.end());
  const auto& gates = benchmark_gates();
  const std::size_t ng = gates.size();

  struct Task {
    std::vector<double> err;
    double aux_err = 0.0;
  };
  const auto tasks = parallel_map(
      deltas.size() * ng,
      [&](std::size_t i) {
        const double delta = deltas[i / ng];
        const NamedGate& gb = gates[i % ng];
        const GateSchedule b_sched = sq_schedule({gb.phi, gb.theta, spec.pulse}, qubit, 0);
        Task t;
        if (spec.qubit_states) {
          const GateSchedule with_b = merge_detuned(parallel ? a_sched : GateSchedule{}, b_sched, delta);
          t.err = run_errors(model_a, with_b, inputs, targets, spec.settings);
          for (std::size_t k = 0; k < t.err.size(); ++k) t.err[k] -= ref[k];
        }
        if (want_aux) {
          const GateSchedule b_only = merge_detuned(GateSchedule{}, b_sched, delta);
          t.aux_err = run_errors(model_a, b_only, {aux}, {aux}, spec.settings).front() - aux_ref;
        }
        return t;
      },
      spec.workers);

  auto summarize = [&](std::size_t di, CrosstalkPoint& p) {
    std::vector<double> all;
    double aux_sum = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      const Task& t = tasks[di * ng + g];
      all.insert(all.end(), t.err.begin(), t.err.end());
      aux_sum += t.aux_err;
    }
    if (!all.empty()) {
      const double n = static_cast<double>(all.size());
      const double mean = std::accumulate(all.begin(), all.end(), 0.0) / n;
      double ss = 0.0;
      for (double e : all) ss += (e - mean) * (e - mean);
      p.mean_error = mean;
      p.std_error = all.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    p.aux_error = aux_sum / static_cast<double>(ng);
  };
  auto index_of = [&](double d) {
    return static_cast<std::size_t>(std::lower_bound(deltas.begin(), deltas.end(), d) - deltas.begin());
  };

  std::vector<CrosstalkPoint> out;
  for (double d : spec.detunings_mhz) {
    CrosstalkPoint p;
    p.delta_mhz = d;
    summarize(index_of(d), p);
    if (spec.reverse) {
      CrosstalkPoint rev;
      summarize(index_of(-d), rev);
      p.reverse_mean_error = rev.mean_error;
    }
    out.push_back(p);
  }
  return out;
}

double fit_scaling_exponent(const std::vector<double>& errors, const std::vector<double>& detunings) {
  if (errors.size() != detunings.size()) throw ValidationError("scaling fit: size mismatch");
  if (errors.size() < 2) throw ValidationError("scaling fit: need at least two points");
  const std::size_t n = errors.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(errors[k] > 0.0)) throw ValidationError("scaling fit: errors must be positive");
    if (detunings[k] == 0.0) throw ValidationError("scaling fit: zero detuning");
    const double x = std::log(std::abs(detunings[k]));
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (std::abs(den) < 1e-300) throw ValidationError("scaling fit: detunings must differ");
  return (dn * sxy - sx * sy) / den;
}

void SpectatorPenaltySpec::validate() const {
  if (detunings_mhz.size() < 5) throw ValidationError("spectator grid needs at least 5 points");
  const auto [lo, hi] = std::minmax_element(detunings_mhz.begin(), detunings_mhz.end());
  if (*hi - *lo < 1.0 - 1e-12) throw ValidationError("spectator grid must span at least 1 MHz");
  settings.validate();
}

SpectatorPenaltySpec SpectatorPenaltySpec::grid(double lo, double hi, int points) {
  if (points < 2) throw ValidationError("spectator grid needs at least 2 points");
  SpectatorPenaltySpec s;
  s.detunings_mhz.clear();
  for (int k = 0; k < points; ++k) s.detunings_mhz.push_back(lo + (hi - lo) * k / (points - 1));
  return s;
}

SpectatorPenalty spectator_penalty(const GateSchedule& schedule, const SpectatorPenaltySpec& spec,
                                   const LevelScheme& scheme) {
  spec.validate();
  // driven lines, per ion
  std::vector<std::pair<int, TransitionRef>> lines;
  for (const auto& seg : schedule.segments()) {
    if (const auto* p = std::get_if<PulseSegment>(&seg)) {
      for (const Tone& t : p->tones) {
        const std::pair<int, TransitionRef> key{t.ion, t.target};
        if (std::find(lines.begin(), lines.end(), key) == lines.end()) lines.push_back(key);
      }
    }
  }
  SpectatorPenalty result;
  result.per_detuning.assign(spec.detunings_mhz.size(), 0.0);
  if (lines.empty()) return result;

  const SimulationModel spectator =
      SimulationModel::single_ion(scheme).with_mask(ErrorSourceMask::crosstalk_only());
  const std::size_t nd = spec.detunings_mhz.size();
  const auto errs = parallel_map(
      lines.size() * nd,
      [&](std::size_t i) {
        const auto& [ion, line] = lines[i / nd];
        const double delta = spec.detunings_mhz[i % nd];
        // the spectator's lines sit delta above: the tones look detuned by -delta
        GateSchedule s;
        for (const auto& seg : schedule.segments()) {
          if (const auto* p = std::get_if<PulseSegment>(&seg)) {
            std::vector<Tone> tones;
            for (Tone t : p->tones) {
              if (t.ion != ion) continue;
              t.ion = 0;
              t.detuning_mhz -= delta;
              tones.push_back(std::move(t));
            }
            if (tones.empty()) {
              s.add_wait(p->duration_us);
            } else {
              s.add_pulse(std::move(tones), p->duration_us);
            }
          } else {
            s.add_wait(segment_duration(seg));
          }
        }
        const int g = scheme.ground_index(line.ground);
        const Vector psi = Vector::Unit(spectator.dimension(), g);
        const Propagator prop(spectator, s, spec.settings);
        const Vector out = prop.evolve_pure(psi);
        return std::clamp(1.0 - std::norm(out(g)), 0.0, 1.0);
      },
      spec.workers);

  double total = 0.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    result.per_detuning[i % nd] += errs[i] / static_cast<double>(lines.size());
    total += errs[i];
  }
  result.penalty = total / static_cast<double>(errs.size());
  return result;
}

}  // namespace reigate
