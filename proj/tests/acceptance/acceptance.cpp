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
// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset, e.g. `reigate_acceptance 1 7`.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "reigate/gate_schemes.hpp"
#include "reigate/metrics.hpp"
#include "reigate/optimizer.hpp"
#include "reigate/parallel.hpp"
#include "reigate/runner.hpp"
#include "reigate/sensitivity.hpp"
#include "reigate/spectral.hpp"

using namespace reigate;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

const IonConfig& config() {
  static const IonConfig c = default_ion_config();
  return c;
}

SimulationModel single(ErrorSourceMask mask = ErrorSourceMask::physical()) {
  return SimulationModel::single_ion(config().scheme, config().qubit).with_mask(mask);
}

int workers() { return default_worker_count(); }

// Shared with criterion 3.
double sq_average_error() {
  static double cached = -1.0;
  if (cached < 0.0) {
    AveragingOptions o;
    o.settings = IntegratorSettings::with_tolerance(1e-8);
    o.workers = workers();
    cached = average_sq_error(single(), default_sq_pulse(), o).mean_error;
  }
  return cached;
}

// ---------------------------------------------------------------------------

Outcome sq_optimum() {
  const auto t0 = std::chrono::steady_clock::now();
  const double e = sq_average_error();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ref = 3.4e-4;
  const bool in_band = e >= ref / 2 && e <= ref * 2;
  return {in_band && secs < 300.0, "mean error " + sci(e) + " (band " + sci(ref / 2) + ".." + sci(ref * 2) +
                                       "), " + sci(secs) + " s of 300 s"};
}

Outcome error_decomposition() {
  const std::vector<double> tg = {0.25, 0.35, 0.5, 0.7, 0.85, 1.0, 1.25, 1.5, 1.68, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0};
  AveragingOptions o;
  o.settings = IntegratorSettings::with_tolerance(1e-9);
  o.workers = workers();
  auto curve = [&](ErrorSourceMask m) {
    const auto model = single(m);
    std::vector<double> out;
    for (double t : tg) out.push_back(average_sq_error(model, CutGaussianParams::make(t, t / 0.4, kPi / std::sqrt(2.0)), o).mean_error);
    return out;
  };
  const auto xt = curve(ErrorSourceMask::crosstalk_only());
  const auto dec = curve(ErrorSourceMask::decay_only());
  const auto phys = curve(ErrorSourceMask::physical());
  int bad_xt = 0, bad_dec = 0, bad_phys = 0;
  for (std::size_t i = 0; i + 1 < tg.size(); ++i) {
    bad_xt += !(xt[i + 1] < xt[i]);
    bad_dec += !(dec[i + 1] > dec[i]);
  }
  for (std::size_t i = 0; i < tg.size(); ++i) bad_phys += !(phys[i] >= std::max(xt[i], dec[i]) - 1e-5);
  std::ostringstream d;
  d << tg.size() << " durations 2t_g=" << 2 * tg.front() << ".." << 2 * tg.back() << " us; crosstalk "
    << sci(xt.front()) << "->" << sci(xt.back()) << ", decay " << sci(dec.front()) << "->" << sci(dec.back())
    << "; violations: crosstalk " << bad_xt << ", decay " << bad_dec << ", physical " << bad_phys;
  return {bad_xt == 0 && bad_dec == 0 && bad_phys == 0, d.str()};
}

Outcome benchmark() {
  BenchmarkOptions o;
  o.n_gates = 1000;
  o.repeats = 100;
  o.seed = 1;
  o.workers = workers();
  const auto r = run_benchmark(single(), default_sq_pulse(), o);
  const double ref = sq_average_error();
  const bool p_ok = std::abs(r.fitted_p - ref) <= 0.3 * ref;
  bool curve_ok = true;
  std::ostringstream d;
  d << "p " << sci(r.fitted_p) << " vs average " << sci(ref) << " (" << sci(100 * (r.fitted_p / ref - 1)) << "%)";
  for (int n : {100, 500, 1000}) {
    const auto i = static_cast<std::size_t>(n - 1);
    const double model = closed_form_epsilon(r.fitted_p, n);
    const bool ok = std::abs(r.epsilon_mean[i] - model) <= 2 * r.epsilon_std[i];
    curve_ok &= ok;
    d << "; n=" << n << " eps " << sci(r.epsilon_mean[i]) << " vs " << sci(model) << " +- 2*" << sci(r.epsilon_std[i]);
  }
  return {p_ok && curve_ok, d.str()};
}

// FWHM midpoint of an aux-error peak sampled on a uniform grid.
double fwhm_center(const std::vector<double>& x, const std::vector<double>& y) {
  const auto top = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  const double half = 0.5 * y[top];
  std::size_t lo = top, hi = top;
  while (lo > 0 && y[lo - 1] >= half) --lo;
  while (hi + 1 < y.size() && y[hi + 1] >= half) ++hi;
  auto cross = [&](std::size_t a, std::size_t b) {  // linear interpolation of the half-level crossing
    return x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
  };
  const double left = lo > 0 ? cross(lo - 1, lo) : x[lo];
  const double right = hi + 1 < y.size() ? cross(hi + 1, hi) : x[hi];
  return 0.5 * (left + right);
}

Outcome crosstalk() {
  const auto model = single(ErrorSourceMask::crosstalk_only());
  std::ostringstream d;

  // (a) far detunings, both signs
  CrosstalkScanSpec far;
  far.detunings_mhz = {601.0, 700.0, 800.0, 1000.0, 1500.0, 2000.0};
  far.aux = false;
  far.settings = IntegratorSettings::with_tolerance(1e-10);
  far.workers = workers();
  double worst = 0.0;
  for (const auto& p : crosstalk_scan(model, far)) worst = std::max({worst, p.mean_error, p.reverse_mean_error});
  const bool far_ok = worst < 3.4e-4;
  d << "max additional error |D|>600: " << sci(worst);

  // (b) aux spikes
  const std::vector<double> expected = {-331.8, -241.8, -140.8, -50.8, 119.2, 209.2};
  bool spikes_ok = true;
  d << "; spike offsets:";
  for (double c : expected) {
    CrosstalkScanSpec s;
    s.qubit_states = false;
    s.reverse = false;
    s.settings = IntegratorSettings::with_tolerance(1e-8);
    s.workers = workers();
    for (int k = -30; k <= 30; ++k) s.detunings_mhz.push_back(c + 0.1 * k);
    const auto pts = crosstalk_scan(model, s);
    std::vector<double> x, y;
    for (const auto& p : pts) {
      x.push_back(p.delta_mhz);
      y.push_back(p.aux_error);
    }
    const double center = fwhm_center(x, y);
    spikes_ok &= std::abs(center - c) <= 0.5;
    d << " " << sci(center - c);
  }

  // (c) GHz scaling
  auto slope = [&](CrosstalkMode mode) {
    CrosstalkScanSpec s;
    s.detunings_mhz = {1000.0, 2000.0, 5000.0, 10000.0};
    s.mode = mode;
    s.aux = false;
    s.reverse = false;
    s.settings = IntegratorSettings::with_tolerance(1e-11);
    s.workers = workers();
    std::vector<double> e, x;
    for (const auto& p : crosstalk_scan(model, s)) {
      e.push_back(p.mean_error);
      x.push_back(p.delta_mhz);
    }
    return fit_scaling_exponent(e, x);
  };
  const double seq = slope(CrosstalkMode::Sequential);
  const double par = slope(CrosstalkMode::Parallel);
  const bool slopes_ok = std::abs(seq + 2.0) <= 0.3 && std::abs(par + 1.0) <= 0.3;
  d << "; slopes sequential " << sci(seq) << ", parallel " << sci(par);
  return {far_ok && spikes_ok && slopes_ok, d.str()};
}

Outcome blockade() {
  const double duration = blockade_gate(BlockadeSpec{}, config().qubit).schedule.total_duration();
  const bool duration_ok = std::abs(duration - 7.7) < 1e-12;
  AveragingOptions o;
  o.workers = workers();
  auto error_at = [&](double dnu) {
    const auto model = build_two_ion_model(config().scheme, config().qubit, DipoleCoupling{dnu, {}});
    return average_tq_error(model, BlockadeSpec{}, o).mean_error;
  };
  // plateau points keep clear of the resonances where a shifted line of B
  // meets one of B's gate tones (0, +-90, 170, 260, 350, ... MHz)
  const std::vector<double> plateau = {-300.0, -150.0, -40.0, 40.0, 130.0, 215.0};
  std::ostringstream d;
  d << "duration " << duration << " us; plateau";
  bool plateau_ok = true;
  double plateau_max = 0.0;
  for (double x : plateau) {
    const double e = error_at(x);
    plateau_ok &= e >= 1e-3 && e <= 4e-3;
    plateau_max = std::max(plateau_max, e);
    d << " " << x << ":" << sci(e);
  }
  bool spikes_ok = true;
  d << "; spikes";
  for (double x : {-90.0, 90.0}) {
    const double e = error_at(x);
    spikes_ok &= e > 2 * plateau_max;
    d << " " << x << ":" << sci(e);
  }
  return {duration_ok && plateau_ok && spikes_ok, d.str()};
}

Outcome interaction() {
  SearchSpec s;
  // Search box: the spread of optimized pulses reported alongside the
  // interaction gate (t_g 1.5+-0.5 us, t_fwhm 0.32+-0.14 us, f_width
  // 12+-3.5 MHz, f_scan 0..2.8 MHz, Omega_0 5.1+-1.3 MHz).
  s.bounds = {{1.0, 2.0}, {0.18, 0.46}, {8.5, 15.5}, {0.0, 2.8}, {3.8, 6.4}};
  s.n_starts = 6;
  s.local_max_iters = 40;
  s.tolerance = 1e-5;
  s.seed = 1;
  s.initial = {1.7, 0.28, 9.5, 2.2, 5.8};
  s.workers = workers();
  InteractionObjectiveOptions o;
  o.isd = true;
  o.states = interaction_search_states();
  const std::vector<double> shifts = {0.1, 1.0, 3.0, 7.5, 12.0};
  const auto res = optimize_interaction_per_shift(config().scheme, config().qubit, shifts, s, o);
  std::ostringstream d;
  bool band_ok = true;
  double e75 = 0.0, e12 = 0.0;
  for (const auto& r : res) {
    d << r.shift_mhz << ":" << sci(r.gate_error) << " ";
    if (std::abs(r.shift_mhz) <= 7.5) band_ok &= r.gate_error >= 2.5e-4 && r.gate_error <= 6e-3;
    if (r.shift_mhz == 7.5) e75 = r.gate_error;
    if (r.shift_mhz == 12.0) e12 = r.gate_error;
  }
  const bool jump_ok = e12 >= 3 * e75;
  d << "; 12/7.5 ratio " << sci(e12 / e75);
  return {band_ok && jump_ok, d.str()};
}

Outcome windows() {
  const auto w = compute_transmission_windows(config().scheme, config().qubit);
  // 0.1 MHz plus a rounding allowance for the floating-point edges
  const double tol = 0.1 + 1e-9;
  const bool ok = std::abs(w.window_0.low + 9.0) <= tol && std::abs(w.window_0.high - 9.1) <= tol &&
                  std::abs(w.window_1.low + 35.9) <= tol && std::abs(w.window_1.high - 14.6) <= tol;
  std::ostringstream d;
  d.precision(6);
  d << "(" << w.window_0.low << ", " << w.window_0.high << ") and (" << w.window_1.low << ", " << w.window_1.high
    << ") MHz";
  return {ok, d.str()};
}

Outcome sensitivity() {
  const auto model = single();
  AveragingOptions avg;
  avg.workers = workers();
  std::ostringstream d;

  std::vector<std::pair<double, double>> grid;
  for (double a : {0.995, 0.9975, 1.0, 1.0025, 1.005})
    for (double b : {0.995, 0.9975, 1.0, 1.0025, 1.005}) grid.emplace_back(a, b);
  double box_max = 0.0;
  for (const auto& p : rabi_scale_grid(model, default_sq_pulse(), grid, avg)) box_max = std::max(box_max, p.error);
  const bool box_ok = box_max < 4e-4;
  d << "Rabi box max " << sci(box_max);

  const double baseline = average_sq_error(model, default_sq_pulse(), avg).mean_error;
  PerturbationSpec spec;
  spec.n_draws = 100;
  spec.osc_strength_max_dev = 0.05;
  spec.splitting_max_dev_khz = 10.0;
  spec.seed = 1;
  RetunePolicy retuned;
  RetunePolicy blind;
  blind.mode = RetuneMode::Blind;
  const auto osc = randomized_param_scan(model, default_sq_pulse(), spec, retuned, PerturbationAxis::OscillatorStrength,
                                         {0.025, 0.05}, avg);
  const auto split = randomized_param_scan(model, default_sq_pulse(), spec, retuned, PerturbationAxis::Splitting,
                                           {5.0, 10.0}, avg);
  const auto blind_split = randomized_param_scan(model, default_sq_pulse(), spec, blind, PerturbationAxis::Splitting,
                                                 {10.0}, avg);
  bool retuned_ok = true;
  d << "; baseline " << sci(baseline) << "; retuned osc";
  for (const auto& p : osc.points) {
    retuned_ok &= p.mean_error <= 2 * baseline;
    d << " " << p.axis_value << ":" << sci(p.mean_error);
  }
  d << ", split";
  for (const auto& p : split.points) {
    retuned_ok &= p.mean_error <= 2 * baseline;
    d << " " << p.axis_value << "kHz:" << sci(p.mean_error);
  }
  const double blind10 = blind_split.points.at(0).mean_error;
  const double retuned10 = split.points.back().mean_error;
  const bool blind_ok = blind10 > retuned10;
  d << "; blind 10kHz " << sci(blind10);
  return {box_ok && retuned_ok && blind_ok, d.str()};
}

Outcome property_suite() {
  std::ostringstream d;
  bool ok = true;
  auto note = [&](const std::string& name, bool pass) {
    ok &= pass;
    if (!pass) d << name << " failed; ";
  };

  // invariants on a driven dissipative run
  {
    const auto model = single();
    const auto settings = IntegratorSettings::with_tolerance(1e-8);
    const Propagator prop(model, sq_schedule({0.4, 1.0, default_sq_pulse()}, config().qubit), settings);
    Vector psi = Vector::Zero(6);
    psi(model.ion(0).levels.q0) = std::sqrt(0.3);
    psi(model.ion(0).levels.q1) = Complex(0.0, std::sqrt(0.7));
    const DensityMatrix r = prop.evolve(DensityMatrix::pure(psi));
    note("trace", std::abs(r.trace() - 1.0) <= 10 * settings.rel_tol);
    note("hermiticity", r.hermiticity_defect() <= 10 * settings.rel_tol);
    note("positivity", r.min_eigenvalue() >= -10 * settings.rel_tol);
  }
  // pulse area closed form
  {
    double worst = 0.0;
    for (auto [tg, sg] : {std::pair{1.68, 4.16}, {2.17, 6.75}, {0.5, 0.3}}) {
      const auto p = CutGaussianParams::make(tg, sg, kPi);
      const double area = p.c1 * sg * std::sqrt(2 * kPi) * std::erf(tg / (2 * std::sqrt(2.0) * sg)) - p.c2 * tg;
      worst = std::max(worst, std::abs(area - kPi));
    }
    note("pulse area", worst <= 1e-9);
  }
  // sechscan joints
  {
    const auto s = default_sechscan();
    double jump = 0.0;
    for (double t : {s.t0, s.t0 + s.t_scan}) {
      const auto a = eval_sechscan(s, t - 1e-10), b = eval_sechscan(s, t + 1e-10);
      jump = std::max({jump, std::abs(a.amplitude - b.amplitude), std::abs(a.phase - b.phase)});
    }
    note("sechscan continuity", jump < 1e-7);
  }
  // Rabi and decay oracles
  {
    const auto ideal = single(ErrorSourceMask::ideal());
    const auto& q = ideal.ion(0).levels;
    double worst = 0.0;
    for (double area : {kPi / 3, kPi, 2.5}) {
      GateSchedule g;
      g.add_pulse({make_tone(0, {"1/2g", "5/2e"}, CutGaussianParams::make(1.0, 2.0, area))});
      const auto r = Propagator(ideal, g, IntegratorSettings::with_tolerance(1e-11)).evolve(DensityMatrix::basis(6, q.q0));
      worst = std::max(worst, std::abs(r.population(q.e) - std::pow(std::sin(area / 2), 2)));
    }
    note("Rabi oracle", worst <= 1e-6);
    const auto phys = single();
    GateSchedule w;
    w.add_wait(300.0);
    const auto r = Propagator(phys, w, IntegratorSettings::with_tolerance(1e-10)).evolve(DensityMatrix::basis(6, q.e));
    const double expect = std::exp(-300.0 / seconds_to_us(config().scheme.t1_optical_s));
    note("decay oracle", std::abs(r.population(q.e) - expect) <= 1e-6);
  }
  // fit inverts the closed form
  {
    std::vector<double> eps;
    for (int n = 1; n <= 1000; ++n) eps.push_back(closed_form_epsilon(3.4e-4, n));
    note("fit inversion", std::abs(fit_error_rate(eps) - 3.4e-4) <= 1e-9);
  }
  // optimizer determinism
  {
    ObjectiveSpec obj;
    obj.names = {"a", "b"};
    obj.gate_term = [](const Params& p) { return std::pow(p[0] - 0.3, 2) + std::pow(p[1] + 0.1, 2) + 0.1 * std::sin(9 * p[0]); };
    SearchSpec s;
    s.bounds = {{-1, 1}, {-1, 1}};
    s.n_starts = 4;
    s.local_max_iters = 50;
    s.seed = 5;
    const auto a = optimize(obj, s);
    s.workers = 4;
    const auto b = optimize(obj, s);
    bool same = a.trace.size() == b.trace.size();
    for (std::size_t i = 0; same && i < a.trace.size(); ++i) same = a.trace[i].params == b.trace[i].params;
    note("optimizer determinism", same && a.params == b.params);
  }
  // byte-identical artifacts
  {
    const auto spec = nlohmann::json::parse(R"({"kind": "benchmark", "seed": 3,
      "params": {"n_gates": 20, "repeats": 3, "phase_samples": 4}})");
    runner::RunOptions o;
    o.kind = "benchmark";
    o.created = "2000-01-01T00:00:00Z";
    o.workers = 1;
    const auto a = runner::run(spec, o);
    o.workers = 3;
    const auto b = runner::run(spec, o);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].content == b[i].content;
    note("artifact reproducibility", same);
  }
  if (ok) d << "all properties hold";
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"SQ optimum", sq_optimum}},
      {2, {"error-source decomposition", error_decomposition}},
      {3, {"randomized benchmark", benchmark}},
      {4, {"crosstalk", crosstalk}},
      {5, {"blockade gate", blockade}},
      {6, {"interaction gate", interaction}},
      {7, {"transmission windows", windows}},
      {8, {"sensitivity", sensitivity}},
      {9, {"property suite", property_suite}},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = entry.second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !out.pass;
    std::printf("criterion %d %s [%s] (%.0f s): %s\n", id, out.pass ? "PASS" : "FAIL", entry.first.c_str(), secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
