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

#include "reigate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/tools/minima.hpp>

#include "reigate/parallel.hpp"
#include "reigate/rng.hpp"

namespace reigate {

ErrorReport ErrorReport::from_samples(std::vector<ErrorSample> samples) {
  ErrorReport r;
  r.samples = std::move(samples);
  const auto n = static_cast<double>(r.samples.size());
  if (r.samples.empty()) return r;
  double sum = 0.0;
  for (const auto& s : r.samples) sum += s.error;
  r.mean_error = sum / n;
  double sq = 0.0;
  for (const auto& s : r.samples) sq += (s.error - r.mean_error) * (s.error - r.mean_error);
  r.std_error = r.samples.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  return r;
}

double state_error(const Matrix& rho, const Vector& target) {
  if (std::abs(target.norm() - 1.0) > 1e-10) {
    throw ValidationError("state_error: target state is not normalized");
  }
  const Complex overlap = target.dot(rho * target);  // <psi|rho|psi>
  double e = 1.0 - overlap.real();
  if (e < 0.0 && e > -1e-12) e = 0.0;
  if (e > 1.0 && e < 1.0 + 1e-12) e = 1.0;
  return e;
}

const std::vector<NamedState>& bowdrey_states() {
  static const std::vector<NamedState> states = [] {
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<NamedState> v;
    auto make = [](Complex a, Complex b) {
      Vector x(2);
      x << a, b;
      return x;
    };
    v.push_back({"0", make(1.0, 0.0)});
    v.push_back({"1", make(0.0, 1.0)});
    v.push_back({"+", make(s, s)});
    v.push_back({"-", make(s, -s)});
    v.push_back({"+i", make(s, Complex(0.0, s))});
    v.push_back({"-i", make(s, Complex(0.0, -s))});
    return v;
  }();
  return states;
}

Vector product_state(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

namespace {

std::vector<int> pick(const std::vector<int>& requested, std::size_t count) {
  if (!requested.empty()) {
    for (int i : requested) {
      if (i < 0 || static_cast<std::size_t>(i) >= count) {
        throw ValidationError("averaging option index out of range");
      }
    }
    return requested;
  }
  std::vector<int> all(count);
  std::iota(all.begin(), all.end(), 0);
  return all;
}


// Final density matrices for inputs given in subspace coordinates. Uses the
// process map when that needs fewer propagated operators.
std::vector<Matrix> propagate_inputs(const Propagator& prop, const std::vector<int>& subspace,
                                     const std::vector<Vector>& inputs) {
  const std::size_t m = subspace.size();
  std::vector<Matrix> out;
  if (inputs.size() >= m * m) {
    const ProcessMap pm = prop.process(subspace);
    for (const auto& psi : inputs) out.push_back(pm.apply(psi * psi.adjoint()));
  } else {
    std::vector<Matrix> batch;
    for (const auto& psi : inputs) {
      Vector full = Vector::Zero(prop.dimension());
      for (std::size_t k = 0; k < m; ++k) full(subspace[k]) = psi(static_cast<Eigen::Index>(k));
      batch.push_back(full * full.adjoint());
    }
    out = prop.evolve(batch);
  }
  for (const auto& rho : out) check_density_matrix(rho, prop.settings().rel_tol, "gate output");
  return out;
}

}  // namespace

ErrorReport average_sq_error(const SimulationModel& model, const SqScheduleFactory& make,
                             const AveragingOptions& options) {
  if (model.num_ions() != 1) throw ValidationError("average_sq_error: single-ion model required");
  const auto state_ids = pick(options.states, bowdrey_states().size());
  const auto gate_ids = pick(options.gates, benchmark_gates().size());
  const auto subspace = qubit_subspace(model);

  std::vector<Vector> inputs;
  for (int s : state_ids) inputs.push_back(bowdrey_states()[static_cast<std::size_t>(s)].psi);

  auto per_gate = parallel_map(
      gate_ids.size(),
      [&](std::size_t gi) {
        const NamedGate& g = benchmark_gates()[static_cast<std::size_t>(gate_ids[gi])];
        const Propagator prop(model, make(g), options.settings);
        const auto outs = propagate_inputs(prop, subspace, inputs);
        const Matrix u = ideal_sq_unitary(g.phi, g.theta);
        std::vector<ErrorSample> samples;
        for (std::size_t k = 0; k < inputs.size(); ++k) {
          const Vector target = embed_qubit(u * inputs[k], model);
          samples.push_back({bowdrey_states()[static_cast<std::size_t>(state_ids[k])].name, g.name,
                             state_error(outs[k], target)});
        }
        return samples;
      },
      options.workers);

  std::vector<ErrorSample> all;
  for (auto& v : per_gate) all.insert(all.end(), v.begin(), v.end());
  return ErrorReport::from_samples(std::move(all));
}

ErrorReport average_sq_error(const SimulationModel& model, const CutGaussianParams& pulse,
                             const AveragingOptions& options) {
  if (model.num_ions() != 1) throw ValidationError("average_sq_error: single-ion model required");
  const QubitAssignment qubit = model.ion(0).qubit;
  return average_sq_error(
      model, [&](const NamedGate& g) { return sq_schedule({g.phi, g.theta, pulse}, qubit); }, options);
}

ErrorReport average_sq_error(const SimulationModel& model, const CutGaussianParams& pulse,
                             const ErrorSourceMask& mask, const AveragingOptions& options) {
  return average_sq_error(apply_error_mask(model, mask), pulse, options);
}

std::vector<double> tq_state_errors(const SimulationModel& model, const TqGate& gate,
                                    const std::vector<Vector>& inputs,
                                    const IntegratorSettings& settings,
                                    const InteractionSpec* frame) {
  if (model.num_ions() != 2) throw ValidationError("TQ gate error needs a two-ion model");
  const auto subspace = qubit_subspace(model);
  const Propagator prop(model, gate.schedule, settings);
  const auto outs = propagate_inputs(prop, subspace, inputs);
  std::vector<double> errors;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Matrix rho = frame ? apply_frame_correction(outs[k], *frame, model) : outs[k];
    errors.push_back(state_error(rho, embed_two_qubit(gate.ideal * inputs[k], model)));
  }
  return errors;
}

ErrorReport average_tq_error(const SimulationModel& model, const TqGateSpec& spec,
                             const AveragingOptions& options) {
  const auto& states = bowdrey_states();
  const auto state_ids = pick(options.states, states.size());
  std::vector<Vector> inputs;
  std::vector<std::string> labels;
  for (int a : state_ids) {
    for (int b : state_ids) {
      inputs.push_back(product_state(states[static_cast<std::size_t>(a)].psi, states[static_cast<std::size_t>(b)].psi));
      labels.push_back(states[static_cast<std::size_t>(a)].name + "," + states[static_cast<std::size_t>(b)].name);
    }
  }

  std::vector<ErrorSample> all;
  if (const auto* blockade = std::get_if<BlockadeSpec>(&spec)) {
    const auto gate_ids = pick(options.gates, benchmark_gates().size());
    auto per_gate = parallel_map(
        gate_ids.size(),
        [&](std::size_t gi) {
          const NamedGate& g = benchmark_gates()[static_cast<std::size_t>(gate_ids[gi])];
          BlockadeSpec s = *blockade;
          s.target.phi = g.phi;
          s.target.theta = g.theta;
          const TqGate gate = blockade_gate(s, model.ion(0).qubit);
          const auto errs = tq_state_errors(model, gate, inputs, options.settings);
          std::vector<ErrorSample> samples;
          for (std::size_t k = 0; k < errs.size(); ++k) samples.push_back({labels[k], g.name, errs[k]});
          return samples;
        },
        options.workers);
    for (auto& v : per_gate) all.insert(all.end(), v.begin(), v.end());
  } else {
    const auto& inter = std::get<InteractionSpec>(spec);
    const TqGate gate = interaction_gate(inter, model.ion(0).qubit);
    const auto errs = tq_state_errors(model, gate, inputs, options.settings, &inter);
    for (std::size_t k = 0; k < errs.size(); ++k) all.push_back({labels[k], "CZ00", errs[k]});
  }
  return ErrorReport::from_samples(std::move(all));
}

// ---------------------------------------------------------------------------
// Benchmark channel

namespace {

// Elementwise action of Ad[W] on a column-major vec for diagonal W.
Vector ad_diagonal(const Vector& w, int d) {
  Vector m(static_cast<Eigen::Index>(d) * d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) m(i + static_cast<Eigen::Index>(j) * d) = w(i) * std::conj(w(j));
  }
  return m;
}

}  // namespace

SqPulseChannel::SqPulseChannel(const SimulationModel& model, const CutGaussianParams& pulse,
                               const IntegratorSettings& settings, int phase_samples) {
  if (model.num_ions() != 1) throw ValidationError("SqPulseChannel: single-ion model required");
  if (phase_samples < 2) throw ValidationError("SqPulseChannel: need at least 2 phase samples");
  const IonSite& ion = model.ion(0);
  const LevelScheme& s = ion.scheme;
  const QubitLevels& lv = ion.levels;
  d_ = model.dimension();
  duration_ = pulse.t_g_us;
  nu0_ = s.transition_mhz(lv.q0_ground, lv.e_excited);
  nu1_ = s.transition_mhz(lv.q1_ground, lv.e_excited);
  q1_ = lv.q1;
  for (int k = 0; k < d_; ++k) {
    energies_.push_back(s.level_energy_mhz(k));
    excited_.push_back(k >= s.num_ground());
  }

  const int n = phase_samples;
  std::vector<Matrix> q(static_cast<std::size_t>(n));
  const QubitAssignment& qa = ion.qubit;
  for (int k = 0; k < n; ++k) {
    const double phi = kTwoPi * k / n;
    GateSchedule sched;
    sched.add_pulse({make_tone(0, {qa.q0, qa.e}, pulse, 0.0), make_tone(0, {qa.q1, qa.e}, pulse, phi)});
    const Matrix sop = Propagator(model, sched, settings).superoperator();
    Vector dvec = Vector::Ones(d_);
    dvec(q1_) = std::polar(1.0, -phi);
    const Vector m = ad_diagonal(dvec, d_);
    // Q = Ad[D^dag] S Ad[D]
    q[static_cast<std::size_t>(k)] = m.conjugate().asDiagonal() * sop * m.asDiagonal();
  }

  const int lo = -(n / 2);
  const int hi = lo + n - 1;
  for (int h = lo; h <= hi; ++h) {
    Matrix c = Matrix::Zero(q.front().rows(), q.front().cols());
    for (int k = 0; k < n; ++k) c += std::polar(1.0 / n, -h * kTwoPi * k / n) * q[static_cast<std::size_t>(k)];
    const double size = c.cwiseAbs().maxCoeff();
    if (size > 1e-12) {
      harmonics_.push_back(h);
      coefficients_.push_back(std::move(c));
    } else {
      truncation_ = std::max(truncation_, size);
    }
    if (h == lo || h == hi) truncation_ = std::max(truncation_, size);
  }
}

void SqPulseChannel::apply(Vector& vec_rho, double phase0, double phase1, double tau_us) const {
  const double a = phase0 - kTwoPi * nu0_ * tau_us;
  const double b = phase1 - kTwoPi * nu1_ * tau_us;
  const double phi = b - a;
  // W = V(tau) Z(a) D(phi), all diagonal.
  Vector w(d_);
  for (int k = 0; k < d_; ++k) {
    double angle = kTwoPi * energies_[static_cast<std::size_t>(k)] * tau_us;
    if (excited_[static_cast<std::size_t>(k)]) angle += a;
    if (k == q1_) angle -= phi;
    w(k) = std::polar(1.0, angle);
  }
  const Vector m = ad_diagonal(w, d_);
  const Vector x = m.conjugate().cwiseProduct(vec_rho);
  Vector y = Vector::Zero(x.size());
  for (std::size_t i = 0; i < harmonics_.size(); ++i) {
    y.noalias() += std::polar(1.0, harmonics_[i] * phi) * (coefficients_[i] * x);
  }
  vec_rho = m.cwiseProduct(y);
}

BenchmarkResult run_benchmark(const SimulationModel& model, const CutGaussianParams& pulse,
                              const BenchmarkOptions& options) {
  if (options.n_gates < 1) throw ValidationError("benchmark: n_gates must be at least 1");
  if (options.repeats < 1) throw ValidationError("benchmark: repeats must be at least 1");
  const SqPulseChannel channel(model, pulse, options.settings, options.phase_samples);
  const int d = model.dimension();
  const double t_g = pulse.t_g_us;

  auto runs = parallel_map(
      static_cast<std::size_t>(options.repeats),
      [&](std::size_t r) {
        CounterRng rng(options.seed, r);
        Vector ideal = bowdrey_states()[r % bowdrey_states().size()].psi;
        const Vector psi0 = embed_qubit(ideal, model);
        Matrix rho = psi0 * psi0.adjoint();
        Vector v = Eigen::Map<Vector>(rho.data(), static_cast<Eigen::Index>(d) * d);
        std::vector<double> eps;
        eps.reserve(static_cast<std::size_t>(options.n_gates));
        for (int n = 0; n < options.n_gates; ++n) {
          const double phi = kTwoPi * rng.uniform();
          const double theta = kPi * rng.uniform();
          const double tau = 2.0 * t_g * n;
          channel.apply(v, 0.0, phi, tau);
          channel.apply(v, kPi - theta, phi + kPi - theta, tau + t_g);
          ideal = ideal_sq_unitary(phi, theta) * ideal;
          const Vector target = embed_qubit(ideal, model);
          const Eigen::Map<const Matrix> r_mat(v.data(), d, d);
          eps.push_back(state_error(r_mat, target));
        }
        return eps;
      },
      options.workers);

  BenchmarkResult result;
  result.repeats = options.repeats;
  result.per_repeat = std::move(runs);
  const auto n_gates = static_cast<std::size_t>(options.n_gates);
  result.epsilon_mean.assign(n_gates, 0.0);
  result.epsilon_std.assign(n_gates, 0.0);
  const double reps = options.repeats;
  for (std::size_t n = 0; n < n_gates; ++n) {
    double sum = 0.0;
    for (const auto& run : result.per_repeat) sum += run[n];
    const double mean = sum / reps;
    double sq = 0.0;
    for (const auto& run : result.per_repeat) sq += (run[n] - mean) * (run[n] - mean);
    result.epsilon_mean[n] = mean;
    result.epsilon_std[n] = options.repeats > 1 ? std::sqrt(sq / (reps - 1.0)) : 0.0;
  }
  result.fitted_p = fit_error_rate(result.epsilon_mean);
  return result;
}

double closed_form_epsilon(double p, int n) {
  return 0.5 * (1.0 - std::pow(1.0 - 2.0 * p, n));
}

double fit_error_rate(const std::vector<double>& epsilon_n) {
  if (epsilon_n.empty()) throw ValidationError("fit_error_rate: empty sequence");
  if (std::all_of(epsilon_n.begin(), epsilon_n.end(), [](double e) { return e == 0.0; })) return 0.0;
  auto residual = [&](double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < epsilon_n.size(); ++i) {
      const double r = epsilon_n[i] - closed_form_epsilon(p, static_cast<int>(i + 1));
      s += r * r;
    }
    return s;
  };
  // Coarse log-spaced scan to bracket the global minimum, then Brent.
  double best_p = 0.5;
  double best = residual(0.5);
  for (int k = 0; k <= 240; ++k) {
    const double p = 0.5 * std::pow(10.0, -12.0 + 12.0 * k / 240.0);
    const double r = residual(p);
    if (r < best) {
      best = r;
      best_p = p;
    }
  }
  const double lo = std::max(0.0, best_p / 1.2);
  const double hi = std::min(0.5, best_p * 1.2);
  const auto found = boost::math::tools::brent_find_minima(residual, lo, hi, std::numeric_limits<double>::digits);
  double p = found.first;
  // Newton polish on the gradient for a noiseless-inversion-grade optimum.
  for (int it = 0; it < 20; ++it) {
    double g = 0.0;
    double h = 0.0;
    for (std::size_t i = 0; i < epsilon_n.size(); ++i) {
      const int n = static_cast<int>(i + 1);
      const double f = closed_form_epsilon(p, n);
      const double df = n * std::pow(1.0 - 2.0 * p, n - 1);
      const double d2f = -2.0 * n * (n - 1) * std::pow(1.0 - 2.0 * p, std::max(0, n - 2));
      const double r = epsilon_n[i] - f;
      g += -2.0 * r * df;
      h += 2.0 * (df * df - r * d2f);
    }
    if (!(h > 0.0)) break;
    const double step = g / h;
    const double next = std::clamp(p - step, 0.0, 0.5);
    if (residual(next) > residual(p)) break;
    if (std::abs(next - p) <= 1e-16 * std::max(1.0, p)) {
      p = next;
      break;
    }
    p = next;
  }
  return p;
}

}  // namespace reigate
