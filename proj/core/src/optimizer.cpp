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
#include "reigate/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "reigate/parallel.hpp"
#include "reigate/rng.hpp"

namespace reigate {

void ObjectiveSpec::validate() const {
  if (!gate_term && !isd_term) throw ValidationError("objective: no terms");
}

double score(const ObjectiveSpec& objective, const Params& params) {
  objective.validate();
  double s = 0.0;
  if (objective.gate_term) s += objective.gate_term(params);
  if (objective.isd_term) s += objective.isd_term(params);
  return s;
}

void SearchSpec::validate() const {
  if (bounds.empty()) throw ValidationError("search: no parameters");
  for (const auto& b : bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
      throw ValidationError("search: bounds must be finite with lo <= hi");
    }
  }
  if (n_starts < 1) throw ValidationError("search: n_starts must be >= 1");
  if (local_max_iters < 0) throw ValidationError("search: local_max_iters must be >= 0");
  if (!(tolerance >= 0.0)) throw ValidationError("search: tolerance must be >= 0");
  if (!initial.empty()) {
    if (initial.size() != bounds.size()) throw ValidationError("search: initial point has wrong size");
    for (std::size_t i = 0; i < initial.size(); ++i) {
      if (initial[i] < bounds[i].lo || initial[i] > bounds[i].hi) {
        throw ValidationError("search: initial point outside bounds");
      }
    }
  }
}

std::vector<Params> halton_points(int count, int dim, std::uint64_t seed) {
  static constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > static_cast<int>(std::size(kPrimes))) throw ValidationError("halton: too many dimensions");
  CounterRng rng(seed, 0x4a17);
  Params shift(static_cast<std::size_t>(dim));
  for (auto& s : shift) s = rng.uniform();
  std::vector<Params> out;
  for (int n = 1; n <= count; ++n) {
    Params p(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const int base = kPrimes[d];
      double f = 1.0, r = 0.0;
      for (int i = n; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
      }
      r += shift[static_cast<std::size_t>(d)];
      p[static_cast<std::size_t>(d)] = r - std::floor(r);
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

struct LocalRun {
  std::vector<TraceEntry> trace;
};

// Nelder-Mead on the free coordinates, normalized to [0,1] and clamped.
LocalRun nelder_mead(const ObjectiveSpec& objective, const SearchSpec& search, const Params& x0,
                     int start) {
  const auto& b = search.bounds;
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].hi > b[i].lo) free.push_back(i);
  }
  const std::size_t n = free.size();
  LocalRun run;

  auto to_params = [&](const std::vector<double>& u) {
    Params x = x0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& bk = b[free[k]];
      x[free[k]] = bk.lo + std::clamp(u[k], 0.0, 1.0) * (bk.hi - bk.lo);
    }
    return x;
  };
  auto eval = [&](const std::vector<double>& u) {
    const Params x = to_params(u);
    TraceEntry e{start, x, 0.0, false};
    try {
      e.score = score(objective, x);
      if (!std::isfinite(e.score)) throw Error("non-finite score");
    } catch (const std::exception&) {
      e.score = std::numeric_limits<double>::infinity();
      e.failed = true;
    }
    run.trace.push_back(e);
    return e.score;
  };

  std::vector<double> u0(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& bk = b[free[k]];
    u0[k] = (x0[free[k]] - bk.lo) / (bk.hi - bk.lo);
  }
  if (n == 0 || search.local_max_iters == 0) {
    eval(u0);
    return run;
  }

  std::vector<std::vector<double>> simplex{u0};
  for (std::size_t k = 0; k < n; ++k) {
    auto v = u0;
    v[k] += (v[k] + 0.1 <= 1.0) ? 0.1 : -0.1;
    simplex.push_back(v);
  }
  std::vector<double> f;
  for (const auto& v : simplex) f.push_back(eval(v));

  auto combo = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = std::clamp(c[k] + t * (w[k] - c[k]), 0.0, 1.0);
    return r;
  };

  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < search.local_max_iters; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto c) { return f[a] < f[c]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::isfinite(f[worst]) && f[worst] - f[best] <= search.tolerance) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    const auto xr = combo(centroid, simplex[worst], -1.0);
    const double fr = eval(xr);
    if (fr < f[best]) {
      const auto xe = combo(centroid, simplex[worst], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        f[worst] = fe;
      } else {
        simplex[worst] = xr;
        f[worst] = fr;
      }
      continue;
    }
    if (fr < f[second]) {
      simplex[worst] = xr;
      f[worst] = fr;
      continue;
    }
    // contraction, outside or inside
    const bool outside = fr < f[worst];
    const auto xc = combo(centroid, outside ? xr : simplex[worst], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : f[worst])) {
      simplex[worst] = xc;
      f[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = combo(simplex[best], simplex[i], 0.5);
      f[i] = eval(simplex[i]);
    }
  }
  return run;
}

}  // namespace

OptimizeResult optimize(const ObjectiveSpec& objective, const SearchSpec& search) {
  objective.validate();
  search.validate();
  const int dim = static_cast<int>(search.bounds.size());

  OptimizeResult result;
  if (!search.initial.empty()) result.starts.push_back(search.initial);
  const int n_random = search.n_starts - static_cast<int>(result.starts.size());
  for (const auto& u : halton_points(std::max(n_random, 0), dim, search.seed)) {
    Params x(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const auto& bd = search.bounds[static_cast<std::size_t>(d)];
      x[static_cast<std::size_t>(d)] = bd.lo + u[static_cast<std::size_t>(d)] * (bd.hi - bd.lo);
    }
    result.starts.push_back(std::move(x));
  }

  const auto runs = parallel_map(
      result.starts.size(),
      [&](std::size_t i) { return nelder_mead(objective, search, result.starts[i], static_cast<int>(i)); },
      search.workers);

  result.score = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    for (const auto& e : r.trace) {
      if (e.score < result.score || result.params.empty()) {
        if (e.score < result.score) result.score = e.score;
        if (e.score <= result.score) result.params = e.params;
      }
      result.trace.push_back(e);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

CutGaussianParams sq_pulse_from(const Params& p, bool drag) {
  if (p.size() != (drag ? 3u : 2u)) throw ValidationError("SQ objective: wrong parameter count");
  return CutGaussianParams::make(p[0], p[1], kPi / std::sqrt(2.0), drag ? p[2] * 1e-9 : 0.0);
}

ObjectiveSpec sq_objective(const SimulationModel& model, const SqObjectiveOptions& options) {
  if (model.num_ions() != 1) throw ValidationError("SQ objective: single-ion model required");
  ObjectiveSpec obj;
  obj.names = {"t_g_us", "sigma_us"};
  if (options.drag) obj.names.push_back("alpha_y_ns");
  const bool drag = options.drag;
  obj.gate_term = [model, options, drag](const Params& p) {
    AveragingOptions avg = options.averaging;
    return average_sq_error(model, sq_pulse_from(p, drag), avg).mean_error;
  };
  if (options.isd) {
    options.spectator.validate();
    const LevelScheme scheme = model.ion(0).scheme;
    const QubitAssignment qubit = model.ion(0).qubit;
    obj.isd_term = [scheme, qubit, options, drag](const Params& p) {
      const auto pulse = sq_pulse_from(p, drag);
      double sum = 0.0;
      for (const auto& g : benchmark_gates()) {
        sum += spectator_penalty(sq_schedule({g.phi, g.theta, pulse}, qubit), options.spectator, scheme)
                   .penalty;
      }
      return sum / static_cast<double>(benchmark_gates().size());
    };
  }
  return obj;
}

SechscanParams sechscan_from(const Params& p) {
  if (p.size() != 5) throw ValidationError("interaction objective: expected 5 parameters");
  return SechscanParams::make(p[0], p[1], p[2], p[3], p[4]);
}

std::vector<Vector> interaction_search_states() {
  const Vector& plus = bowdrey_states()[2].psi;
  return {product_state(plus, plus)};
}

namespace {

InteractionSpec calibrated(const SimulationModel& model, const SechscanParams& pulse, bool frame,
                           const IntegratorSettings& settings) {
  InteractionSpec spec;
  spec.pulse = pulse;
  return calibrate_interaction(spec, model, frame, settings);
}

double interaction_isd(const SechscanParams& pulse, const QubitAssignment& qubit,
                       const LevelScheme& scheme, const SpectatorPenaltySpec& spectator) {
  InteractionSpec spec;
  spec.pulse = pulse;
  return spectator_penalty(interaction_gate(spec, qubit).schedule, spectator, scheme).penalty;
}

}  // namespace

ObjectiveSpec interaction_objective(const SimulationModel& model,
                                    const InteractionObjectiveOptions& options) {
  if (model.num_ions() != 2) throw ValidationError("interaction objective: two-ion model required");
  ObjectiveSpec obj;
  obj.names = {"t_g_us", "t_fwhm_us", "f_width_mhz", "f_scan_mhz", "omega0_mhz"};
  obj.gate_term = [model, options](const Params& p) {
    const InteractionSpec spec = calibrated(model, sechscan_from(p), options.frame_correction, options.settings);
    if (options.states.empty()) {
      AveragingOptions avg;
      avg.settings = options.settings;
      return average_tq_error(model, spec, avg).mean_error;
    }
    const TqGate gate = interaction_gate(spec, model.ion(0).qubit);
    const auto errs = tq_state_errors(model, gate, options.states, options.settings, &spec);
    return std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(errs.size());
  };
  if (options.isd) {
    options.spectator.validate();
    const LevelScheme scheme = model.ion(0).scheme;
    const QubitAssignment qubit = model.ion(0).qubit;
    obj.isd_term = [scheme, qubit, options](const Params& p) {
      return interaction_isd(sechscan_from(p), qubit, scheme, options.spectator);
    };
  }
  return obj;
}

std::vector<ShiftOptimum> optimize_interaction_per_shift(const LevelScheme& scheme,
                                                         const QubitAssignment& qubit,
                                                         const std::vector<double>& shifts_mhz,
                                                         const SearchSpec& search,
                                                         const InteractionObjectiveOptions& options) {
  std::vector<ShiftOptimum> out;
  for (double shift : shifts_mhz) {
    if (shift == 0.0 || !std::isfinite(shift)) {
      throw ValidationError("interaction optimization: shifts must be nonzero");
    }
    const SimulationModel model = build_two_ion_model(scheme, qubit, DipoleCoupling{shift, {}});
    const OptimizeResult r = optimize(interaction_objective(model, options), search);
    if (!std::isfinite(r.score)) throw Error("interaction optimization: no evaluable point");

    ShiftOptimum o;
    o.shift_mhz = shift;
    o.pulse = sechscan_from(r.params);
    o.gate = calibrated(model, o.pulse, options.frame_correction, options.settings);
    o.search_score = r.score;
    o.evaluations = static_cast<int>(r.trace.size());
    AveragingOptions avg;
    avg.settings = options.settings;
    avg.workers = search.workers;
    const ErrorReport full = average_tq_error(model, o.gate, avg);
    o.gate_error = full.mean_error;
    o.gate_error_std = full.std_error;
    if (options.isd) o.isd_penalty = interaction_isd(o.pulse, qubit, scheme, options.spectator);
    out.push_back(o);
  }
  return out;
}

}  // namespace reigate
