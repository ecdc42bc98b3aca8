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
#include "reigate/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reigate/parallel.hpp"
#include "reigate/rng.hpp"

namespace reigate {

namespace {

constexpr std::uint64_t kResidualStream = 1ull << 40;

double signed_unit(CounterRng& rng) { return rng.uniform(-1.0, 1.0); }

// Shifts adjacent gaps of one manifold, keeping level `anchor` fixed.
void perturb_manifold(std::vector<Level>& levels, int anchor, double max_dev_mhz, CounterRng& rng) {
  std::vector<std::size_t> order(levels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return levels[a].offset_mhz < levels[b].offset_mhz; });
  std::vector<double> pos(levels.size());
  pos[order[0]] = levels[order[0]].offset_mhz;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const double gap = levels[order[k]].offset_mhz - levels[order[k - 1]].offset_mhz;
    pos[order[k]] = pos[order[k - 1]] + gap + max_dev_mhz * signed_unit(rng);
  }
  const double shift = levels[static_cast<std::size_t>(anchor)].offset_mhz - pos[static_cast<std::size_t>(anchor)];
  for (std::size_t k = 0; k < levels.size(); ++k) levels[k].offset_mhz = pos[k] + shift;
}

}  // namespace

void PerturbationSpec::validate() const {
  if (!(rabi_scale[0] > 0.0) || !(rabi_scale[1] > 0.0)) {
    throw ValidationError("perturbation: Rabi scales must be positive");
  }
  if (!(osc_strength_max_dev >= 0.0) || !(splitting_max_dev_khz >= 0.0)) {
    throw ValidationError("perturbation: deviations must be non-negative");
  }
  if (n_draws < 1) throw ValidationError("perturbation: n_draws must be >= 1");
}

void RetunePolicy::validate() const {
  if (!(rabi_residual >= 0.0) || !(freq_residual_khz >= 0.0)) {
    throw ValidationError("retune policy: residuals must be non-negative");
  }
}

LevelScheme perturb_scheme(const LevelScheme& nominal, const QubitAssignment& qubit,
                           double osc_max_dev, double splitting_max_dev_khz, std::uint64_t seed,
                           std::uint64_t draw) {
  const QubitLevels lv = resolve(nominal, qubit);
  LevelScheme out = nominal;
  CounterRng rng(seed, draw);
  for (auto& row : out.oscillator_strength) {
    for (double& f : row) f = std::clamp(f + osc_max_dev * signed_unit(rng), 0.0, 1.0);
  }
  const double dev_mhz = splitting_max_dev_khz * 1e-3;
  perturb_manifold(out.ground, lv.q0_ground, dev_mhz, rng);
  perturb_manifold(out.excited, lv.e_excited, dev_mhz, rng);
  out.validate();
  return out;
}

GateSchedule adapt_schedule(const GateSchedule& schedule, const LevelScheme& nominal,
                            const LevelScheme& truth, const RetunePolicy& policy,
                            const double rabi_scale[2], const QubitAssignment& qubit,
                            std::uint64_t seed, std::uint64_t draw) {
  policy.validate();
  // residuals per distinct (ion, transition), in order of appearance
  std::vector<std::pair<int, TransitionRef>> keys;
  std::vector<std::pair<double, double>> residual;
  CounterRng rng(seed, draw | kResidualStream);
  auto residual_for = [&](const Tone& t) {
    const std::pair<int, TransitionRef> key{t.ion, t.target};
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it != keys.end()) return residual[static_cast<std::size_t>(it - keys.begin())];
    keys.push_back(key);
    const double df = signed_unit(rng) * policy.freq_residual_khz * 1e-3;
    const double da = signed_unit(rng) * policy.rabi_residual;
    residual.emplace_back(df, da);
    return residual.back();
  };
  return map_tones(schedule, [&](Tone& t) {
    const int g = truth.ground_index(t.target.ground);
    const int e = truth.excited_index(t.target.excited);
    t.rabi_scale *= rabi_scale[t.target.ground == qubit.q1 ? 1 : 0];
    if (policy.mode == RetuneMode::Blind) {
      // aimed at the nominal line with the nominal strength
      t.detuning_mhz += nominal.transition_mhz(g, e) - truth.transition_mhz(g, e);
      if (!t.reference_strength) t.reference_strength = nominal.strength(g, e);
    } else {
      const auto [df, da] = residual_for(t);
      t.detuning_mhz += df;
      t.rabi_scale *= 1.0 + da;
    }
  });
}

std::vector<RabiGridPoint> rabi_scale_grid(const SimulationModel& model, const CutGaussianParams& pulse,
                                           const std::vector<std::pair<double, double>>& grid,
                                           const AveragingOptions& options) {
  if (model.num_ions() != 1) throw ValidationError("rabi grid: single-ion model required");
  const QubitAssignment qubit = model.ion(0).qubit;
  AveragingOptions inner = options;
  inner.workers = 1;
  return parallel_map(
      grid.size(),
      [&](std::size_t i) {
        const auto [s0, s1] = grid[i];
        if (!(s0 > 0.0) || !(s1 > 0.0)) throw ValidationError("rabi grid: scales must be positive");
        const auto make = [&](const NamedGate& g) {
          return map_tones(sq_schedule({g.phi, g.theta, pulse}, qubit), [&](Tone& t) {
            t.rabi_scale *= t.target.ground == qubit.q1 ? s1 : s0;
          });
        };
        return RabiGridPoint{s0, s1, average_sq_error(model, make, inner).mean_error};
      },
      options.workers);
}

namespace {

std::pair<double, double> axis_deviations(const PerturbationSpec& spec, PerturbationAxis axis, double v) {
  switch (axis) {
    case PerturbationAxis::OscillatorStrength:
      return {v, 0.0};
    case PerturbationAxis::Splitting:
      return {0.0, v};
    case PerturbationAxis::Both:
      break;
  }
  const double ratio = spec.osc_strength_max_dev > 0.0
                           ? spec.splitting_max_dev_khz / spec.osc_strength_max_dev
                           : 0.0;
  return {v, v * ratio};
}

ScanPoint summarize(double v, const std::vector<double>& e) {
  ScanPoint p;
  p.axis_value = v;
  const double n = static_cast<double>(e.size());
  p.mean_error = std::accumulate(e.begin(), e.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : e) ss += (x - p.mean_error) * (x - p.mean_error);
  p.std_error = e.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return p;
}

}  // namespace

ScanResult randomized_param_scan(const SimulationModel& model, const CutGaussianParams& pulse,
                                 const PerturbationSpec& spec, const RetunePolicy& policy,
                                 PerturbationAxis axis, const std::vector<double>& axis_values,
                                 const AveragingOptions& options) {
  spec.validate();
  policy.validate();
  if (model.num_ions() != 1) throw ValidationError("parameter scan: single-ion model required");
  for (double v : axis_values) {
    if (!(v >= 0.0)) throw ValidationError("parameter scan: axis values must be non-negative");
  }
  const LevelScheme& nominal = model.ion(0).scheme;
  const QubitAssignment qubit = model.ion(0).qubit;
  const auto nd = static_cast<std::size_t>(spec.n_draws);
  AveragingOptions inner = options;
  inner.workers = 1;

  const auto errors = parallel_map(
      axis_values.size() * nd,
      [&](std::size_t i) {
        const double v = axis_values[i / nd];
        const auto draw = static_cast<std::uint64_t>(i % nd);
        const auto [osc, split] = axis_deviations(spec, axis, v);
        const LevelScheme truth = perturb_scheme(nominal, qubit, osc, split, spec.seed, draw);
        const SimulationModel m = model.with_scheme(0, truth);
        const auto make = [&](const NamedGate& g) {
          return adapt_schedule(sq_schedule({g.phi, g.theta, pulse}, qubit), nominal, truth, policy,
                                spec.rabi_scale, qubit, spec.seed, draw);
        };
        return average_sq_error(m, make, inner).mean_error;
      },
      options.workers);

  ScanResult out;
  for (std::size_t a = 0; a < axis_values.size(); ++a) {
    std::vector<double> e(errors.begin() + static_cast<std::ptrdiff_t>(a * nd),
                          errors.begin() + static_cast<std::ptrdiff_t>((a + 1) * nd));
    for (std::size_t k = 0; k < nd; ++k) {
      out.draws.push_back({axis_values[a], static_cast<int>(k), e[k]});
    }
    out.points.push_back(summarize(axis_values[a], e));
  }
  return out;
}

std::vector<TqUncertaintyPoint> tq_uncertainty_scan(const LevelScheme& scheme, const QubitAssignment& qubit,
                                                    const std::vector<double>& shifts_mhz,
                                                    const PerturbationSpec& spec,
                                                    const RetunePolicy& policy,
                                                    const TqUncertaintyOptions& options) {
  spec.validate();
  policy.validate();
  const auto& st = bowdrey_states();
  // (|0>+|1>)(|0>+i|1>) and (|0>+|1>)(|0>+|1>)
  const Vector blockade_in = product_state(st[2].psi, st[4].psi);
  const Vector inter_in = product_state(st[2].psi, st[2].psi);
  const auto nd = static_cast<std::size_t>(spec.n_draws);

  std::vector<TqUncertaintyPoint> out;
  for (double shift : shifts_mhz) {
    const SimulationModel nominal_model = build_two_ion_model(scheme, qubit, DipoleCoupling{shift, {}});
    InteractionSpec inter;
    inter.pulse = options.interaction_pulse;
    inter = calibrate_interaction(inter, nominal_model, false, options.settings);
    const TqGate block = blockade_gate(options.blockade, qubit);
    const TqGate cz = interaction_gate(inter, qubit);

    const auto errs = parallel_map(
        nd,
        [&](std::size_t draw) {
          const LevelScheme truth = perturb_scheme(scheme, qubit, spec.osc_strength_max_dev,
                                                   spec.splitting_max_dev_khz, spec.seed, draw);
          const SimulationModel m = build_two_ion_model(truth, qubit, DipoleCoupling{shift, {}});
          TqGate b = block;
          b.schedule = adapt_schedule(block.schedule, scheme, truth, policy, spec.rabi_scale, qubit,
                                      spec.seed, draw);
          TqGate c = cz;
          c.schedule = adapt_schedule(cz.schedule, scheme, truth, policy, spec.rabi_scale, qubit,
                                      spec.seed, draw);
          const double eb = tq_state_errors(m, b, {blockade_in}, options.settings).front();
          const double ec = tq_state_errors(m, c, {inter_in}, options.settings, &inter).front();
          return std::pair{eb, ec};
        },
        options.workers);

    TqUncertaintyPoint p;
    p.shift_mhz = shift;
    for (const auto& [eb, ec] : errs) {
      p.blockade_draws.push_back(eb);
      p.interaction_draws.push_back(ec);
    }
    const ScanPoint sb = summarize(shift, p.blockade_draws);
    const ScanPoint sc = summarize(shift, p.interaction_draws);
    p.blockade_mean = sb.mean_error;
    p.blockade_std = sb.std_error;
    p.interaction_mean = sc.mean_error;
    p.interaction_std = sc.std_error;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace reigate
