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
#include "reigate/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "reigate/gate_schemes.hpp"
#include "reigate/metrics.hpp"
#include "reigate/optimizer.hpp"
#include "reigate/parallel.hpp"
#include "reigate/sensitivity.hpp"
#include "reigate/spectral.hpp"
#include "reigate/text_format.hpp"

namespace reigate::runner {

using json = nlohmann::json;

namespace {

// -- spec reading -------------------------------------------------------------

// Typed access to one JSON object; unknown keys are an error so typos do not
// silently fall back to defaults.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  double number(const std::string& key, std::optional<double> fallback = {}) {
    if (!has(key)) return need(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key + ": must be finite");
    return x;
  }

  int integer(const std::string& key, std::optional<int> fallback = {}) {
    if (!has(key)) return need(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, std::optional<bool> fallback = {}) {
    if (!has(key)) return need(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = {}) {
    if (!has(key)) return need(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = {}) {
    if (!has(key)) return need(key, fallback);
    const json& v = j_.at(key);
    if (!v.is_array()) fail(key + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key + ": expected finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(key + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
      if (!x.is_string()) fail(key + ": expected strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  Block object(const std::string& key) {
    used_.insert(key);
    static const json empty = json::object();
    if (!j_.contains(key) || j_.at(key).is_null()) return Block(empty, path_ + "." + key);
    return Block(j_.at(key), path_ + "." + key);
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  /// Rejects keys that were never looked at.
  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) fail("unknown key '" + k + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("spec " + path_ + ": " + msg);
  }

 private:
  template <class T>
  T need(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) fail("missing required key '" + key + "'");
    return *fallback;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// -- formatting ---------------------------------------------------------------

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Csv {
 public:
  Csv(const json& meta, std::vector<std::string> columns) : ncol_(columns.size()) {
    for (const auto& [k, v] : meta.items()) {
      out_ << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
    row_strings(columns);
  }
  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(num(v));
    row_strings(s);
  }
  void row_strings(const std::vector<std::string>& cells) {
    if (cells.size() != ncol_) throw Error("csv: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::size_t ncol_;
  std::ostringstream out_;
};

// -- shared context -----------------------------------------------------------

struct Context {
  std::string kind;
  IonConfig config;
  IntegratorSettings settings;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  json meta;
  std::vector<Artifact> artifacts;

  std::uint64_t require_seed() const {
    if (!seed) throw ValidationError("spec: kind '" + kind + "' is stochastic and needs a seed");
    return *seed;
  }
  void add_json(const std::string& name, json body) {
    body["metadata"] = meta;
    artifacts.push_back({name, body.dump(2) + "\n"});
  }
  void add_csv(const std::string& name, const Csv& csv) { artifacts.push_back({name, csv.str()}); }
};

ErrorSourceMask parse_mask(const std::string& s) {
  if (s == "physical") return ErrorSourceMask::physical();
  if (s == "decay-only") return ErrorSourceMask::decay_only();
  if (s == "crosstalk-only") return ErrorSourceMask::crosstalk_only();
  if (s == "ideal") return ErrorSourceMask::ideal();
  throw ValidationError("spec: unknown mask '" + s + "' (physical, decay-only, crosstalk-only, ideal)");
}

CutGaussianParams parse_pulse(Block b, const CutGaussianParams& fallback) {
  const double tg = b.number("t_g_us", fallback.t_g_us);
  const double sigma = b.number("sigma_us", fallback.sigma_us);
  const double area = b.number("area_rad", fallback.target_area);
  const double alpha = b.number("alpha_y_s", fallback.drag_alpha_y_s);
  b.finish();
  return CutGaussianParams::make(tg, sigma, area, alpha);
}

json pulse_json(const CutGaussianParams& p) {
  return {{"t_g_us", p.t_g_us}, {"sigma_us", p.sigma_us}, {"area_rad", p.target_area},
          {"alpha_y_s", p.drag_alpha_y_s}};
}

SechscanParams parse_sechscan(Block b, const SechscanParams& fallback) {
  const double tg = b.number("t_g_us", fallback.t_g_us);
  const double fwhm = b.number("t_fwhm_us", fallback.t_fwhm_us);
  const double fw = b.number("f_width_mhz", fallback.f_width_mhz);
  const double fs = b.number("f_scan_mhz", fallback.f_scan_mhz);
  const double om = b.number("omega0_mhz", fallback.omega0_mhz);
  b.finish();
  return SechscanParams::make(tg, fwhm, fw, fs, om);
}

json sechscan_json(const SechscanParams& p) {
  return {{"t_g_us", p.t_g_us}, {"t_fwhm_us", p.t_fwhm_us}, {"f_width_mhz", p.f_width_mhz},
          {"f_scan_mhz", p.f_scan_mhz}, {"omega0_mhz", p.omega0_mhz}};
}

// Either an explicit list or {"from", "to", "step"} / {"from", "to", "points"}.
std::vector<double> parse_grid(Block& parent, const std::string& key,
                               std::optional<std::vector<double>> fallback = {}) {
  if (!parent.has(key)) {
    if (!fallback) parent.fail("missing required key '" + key + "'");
    return *fallback;
  }
  const json& v = parent.raw(key);
  if (v.is_array()) return parent.numbers(key);
  Block g(v, key);
  const double from = g.number("from");
  const double to = g.number("to");
  std::vector<double> out;
  if (g.has("points")) {
    const int n = g.integer("points");
    if (n < 2) g.fail("points must be >= 2");
    for (int k = 0; k < n; ++k) out.push_back(from + (to - from) * k / (n - 1));
  } else {
    const double step = g.number("step");
    if (!(step > 0.0)) g.fail("step must be positive");
    const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
    if (n < 0 || n > 1000000) g.fail("bad range");
    for (long k = 0; k <= n; ++k) out.push_back(from + step * static_cast<double>(k));
  }
  g.finish();
  return out;
}

std::vector<int> name_indices(const std::vector<std::string>& names, bool gates) {
  std::vector<int> out;
  for (const auto& n : names) {
    int idx = -1;
    if (gates) {
      const auto& g = benchmark_gates();
      for (std::size_t i = 0; i < g.size(); ++i) if (g[i].name == n) idx = static_cast<int>(i);
    } else {
      const auto& s = bowdrey_states();
      for (std::size_t i = 0; i < s.size(); ++i) if (s[i].name == n) idx = static_cast<int>(i);
    }
    if (idx < 0) throw ValidationError("spec: unknown " + std::string(gates ? "gate" : "state") + " '" + n + "'");
    out.push_back(idx);
  }
  return out;
}

json samples_json(const ErrorReport& r) {
  json arr = json::array();
  for (const auto& s : r.samples) arr.push_back({{"state", s.state}, {"gate", s.gate}, {"error", s.error}});
  return arr;
}

SimulationModel single_model(const Context& ctx, const ErrorSourceMask& mask) {
  return SimulationModel::single_ion(ctx.config.scheme, ctx.config.qubit).with_mask(mask);
}

// -- kinds --------------------------------------------------------------------

void run_windows(Context& ctx, Block& p) {
  const double span = p.number("span_mhz", 3000.0);
  p.finish();
  const WindowReport w = compute_transmission_windows(ctx.config.scheme, ctx.config.qubit, span);
  auto win = [](const Window& x) { return json{{"low_mhz", finite_or_null(x.low)}, {"high_mhz", finite_or_null(x.high)}}; };
  ctx.add_json("windows.json", {{"span_mhz", span}, {"window_0", win(w.window_0)}, {"window_1", win(w.window_1)}});
}

void run_sq_error(Context& ctx, Block& p) {
  const CutGaussianParams pulse = parse_pulse(p.object("pulse"), default_sq_pulse());
  const auto masks = p.strings("masks", {p.has("mask") ? p.string("mask") : std::string("physical")});
  AveragingOptions avg;
  avg.settings = ctx.settings;
  avg.workers = ctx.workers;
  avg.states = name_indices(p.strings("states", {}), false);
  avg.gates = name_indices(p.strings("gates", {}), true);

  if (!p.has("sweep")) {
    p.finish();
    json results = json::array();
    for (const auto& m : masks) {
      const ErrorReport r = average_sq_error(single_model(ctx, parse_mask(m)), pulse, avg);
      results.push_back({{"mask", m}, {"mean_error", r.mean_error}, {"std_error", r.std_error},
                         {"samples", samples_json(r)}});
    }
    ctx.add_json("sq_error.json", {{"pulse", pulse_json(pulse)}, {"results", results}});
    return;
  }
  Block sweep = p.object("sweep");
  const double ratio = sweep.number("ratio", 0.4);
  const auto tgs = parse_grid(sweep, "t_g_us");
  const double area = sweep.number("area_rad", pulse.target_area);
  sweep.finish();
  p.finish();
  if (!(ratio > 0.0)) throw ValidationError("spec: sweep ratio must be positive");
  Csv csv(ctx.meta, {"mask", "t_g_us", "sigma_us", "mean_error", "std_error"});
  json rows = json::array();
  for (const auto& m : masks) {
    const SimulationModel model = single_model(ctx, parse_mask(m));
    for (double tg : tgs) {
      const auto pl = CutGaussianParams::make(tg, tg / ratio, area);
      const ErrorReport r = average_sq_error(model, pl, avg);
      csv.row_strings({m, num(tg), num(pl.sigma_us), num(r.mean_error), num(r.std_error)});
      rows.push_back({{"mask", m}, {"t_g_us", tg}, {"mean_error", r.mean_error}});
    }
  }
  ctx.add_csv("sq_error_sweep.csv", csv);
  ctx.add_json("sq_error_sweep.json", {{"ratio", ratio}, {"rows", rows}});
}

void run_benchmark(Context& ctx, Block& p) {
  const CutGaussianParams pulse = parse_pulse(p.object("pulse"), default_sq_pulse());
  BenchmarkOptions o;
  o.n_gates = p.integer("n_gates", 1000);
  o.repeats = p.integer("repeats", 100);
  o.phase_samples = p.integer("phase_samples", 16);
  const std::string mask = p.string("mask", "physical");
  p.finish();
  if (o.n_gates < 1 || o.repeats < 2) throw ValidationError("spec: need n_gates >= 1 and repeats >= 2");
  o.seed = ctx.require_seed();
  o.settings = ctx.settings;
  o.workers = ctx.workers;
  const BenchmarkResult r = run_benchmark(single_model(ctx, parse_mask(mask)), pulse, o);

  Csv csv(ctx.meta, {"n", "epsilon_mean", "epsilon_std", "closed_form"});
  for (int n = 1; n <= o.n_gates; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    csv.row({static_cast<double>(n), r.epsilon_mean[i], r.epsilon_std[i], closed_form_epsilon(r.fitted_p, n)});
  }
  ctx.add_csv("benchmark.csv", csv);
  ctx.add_json("benchmark.json", {{"pulse", pulse_json(pulse)}, {"mask", mask}, {"n_gates", o.n_gates},
                                  {"repeats", o.repeats}, {"phase_samples", o.phase_samples},
                                  {"fitted_p", r.fitted_p},
                                  {"epsilon_final", r.epsilon_mean.back()}});
}

void run_crosstalk(Context& ctx, Block& p) {
  CrosstalkScanSpec s;
  s.detunings_mhz = parse_grid(p, "detunings_mhz");
  const std::string mode = p.string("mode", "sequential");
  if (mode == "sequential") {
    s.mode = CrosstalkMode::Sequential;
  } else if (mode == "parallel") {
    s.mode = CrosstalkMode::Parallel;
  } else {
    throw ValidationError("spec: mode must be sequential or parallel");
  }
  s.idle_gate = p.string("idle_gate", "X");
  s.aux = p.boolean("aux", true);
  s.qubit_states = p.boolean("qubit_states", true);
  s.reverse = p.boolean("reverse", true);
  s.pulse = parse_pulse(p.object("pulse"), default_sq_pulse());
  const std::string mask = p.string("mask", "physical");
  std::optional<std::vector<double>> fit;
  if (p.has("fit_range_mhz")) fit = p.numbers("fit_range_mhz");
  p.finish();
  s.settings = ctx.settings;
  s.workers = ctx.workers;
  const auto pts = crosstalk_scan(single_model(ctx, parse_mask(mask)), s);

  Csv csv(ctx.meta, {"delta_mhz", "mean_error", "std_error", "aux_error", "reverse_mean_error"});
  for (const auto& q : pts) csv.row({q.delta_mhz, q.mean_error, q.std_error, q.aux_error, q.reverse_mean_error});
  ctx.add_csv("crosstalk.csv", csv);
  json summary{{"mode", mode}, {"mask", mask}, {"points", pts.size()}};
  if (fit) {
    if (fit->size() != 2) throw ValidationError("spec: fit_range_mhz needs [low, high]");
    std::vector<double> e, d;
    for (const auto& q : pts) {
      if (std::abs(q.delta_mhz) >= (*fit)[0] && std::abs(q.delta_mhz) <= (*fit)[1]) {
        e.push_back(q.mean_error);
        d.push_back(q.delta_mhz);
      }
    }
    summary["slope"] = fit_scaling_exponent(e, d);
  }
  ctx.add_json("crosstalk.json", summary);
}

void run_tq_error(Context& ctx, Block& p) {
  const std::string gate = p.string("gate");
  const auto shifts = parse_grid(p, "dipole_shifts_mhz");
  const std::string mask = p.string("mask", "physical");
  AveragingOptions avg;
  avg.settings = ctx.settings;
  avg.workers = ctx.workers;
  avg.states = name_indices(p.strings("states", {}), false);
  avg.gates = name_indices(p.strings("gates", {}), true);

  TqGateSpec spec;
  bool frame = false;
  json params;
  if (gate == "blockade") {
    BlockadeSpec b;
    b.control = parse_pulse(p.object("control"), default_control_pulse());
    b.target.pulse = parse_pulse(p.object("target_pulse"), default_sq_pulse());
    spec = b;
    params = {{"control", pulse_json(b.control)}, {"target_pulse", pulse_json(b.target.pulse)}};
  } else if (gate == "interaction") {
    InteractionSpec in;
    in.pulse = parse_sechscan(p.object("sechscan"), default_sechscan());
    frame = p.boolean("frame_correction", false);
    spec = in;
    params = {{"sechscan", sechscan_json(in.pulse)}, {"frame_correction", frame}};
  } else {
    throw ValidationError("spec: gate must be blockade or interaction");
  }
  p.finish();

  Csv csv(ctx.meta, {"dipole_shift_mhz", "mean_error", "std_error", "wait_us"});
  json rows = json::array();
  for (double shift : shifts) {
    const SimulationModel model =
        build_two_ion_model(ctx.config.scheme, ctx.config.qubit, DipoleCoupling{shift, {}}).with_mask(parse_mask(mask));
    TqGateSpec s = spec;
    double wait = 0.0;
    if (auto* in = std::get_if<InteractionSpec>(&s)) {
      *in = calibrate_interaction(*in, model, frame, ctx.settings);
      wait = in->wait_us;
    }
    const ErrorReport r = average_tq_error(model, s, avg);
    csv.row({shift, r.mean_error, r.std_error, wait});
    rows.push_back({{"dipole_shift_mhz", shift}, {"mean_error", r.mean_error}, {"std_error", r.std_error},
                    {"wait_us", wait}});
  }
  ctx.add_csv("tq_error.csv", csv);
  ctx.add_json("tq_error.json", {{"gate", gate}, {"mask", mask}, {"params", params}, {"rows", rows}});
}

std::vector<ParamBound> parse_bounds(Block& p, std::vector<ParamBound> fallback) {
  if (!p.has("bounds")) return fallback;
  const json& v = p.raw("bounds");
  if (!v.is_array()) p.fail("bounds: expected [[lo, hi], ...]");
  std::vector<ParamBound> out;
  for (const auto& b : v) {
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
      p.fail("bounds: expected [[lo, hi], ...]");
    }
    out.push_back({b[0].get<double>(), b[1].get<double>()});
  }
  if (out.size() != fallback.size()) p.fail("bounds: wrong number of parameters");
  return out;
}

json trace_csv_and_json(Context& ctx, const std::string& stem, const ObjectiveSpec& obj,
                        const OptimizeResult& r, const SearchSpec& s) {
  std::vector<std::string> cols{"start", "score", "failed"};
  cols.insert(cols.end(), obj.names.begin(), obj.names.end());
  Csv csv(ctx.meta, cols);
  for (const auto& e : r.trace) {
    std::vector<std::string> cells{std::to_string(e.start), num(e.score), e.failed ? "1" : "0"};
    for (double x : e.params) cells.push_back(num(x));
    csv.row_strings(cells);
  }
  ctx.add_csv(stem + "_trace.csv", csv);
  json params;
  for (std::size_t i = 0; i < obj.names.size(); ++i) params[obj.names[i]] = r.params[i];
  return {{"params", params}, {"score", r.score}, {"trace_length", r.trace.size()},
          {"budget", {{"n_starts", s.n_starts}, {"local_max_iters", s.local_max_iters},
                      {"tolerance", s.tolerance}}}};
}

void run_optimize(Context& ctx, Block& p) {
  const std::string objective = p.string("objective");
  SearchSpec s;
  s.n_starts = p.integer("n_starts", 32);
  s.local_max_iters = p.integer("local_max_iters", 500);
  s.tolerance = p.number("tolerance", 1e-6);
  s.seed = ctx.require_seed();
  s.workers = ctx.workers;
  const bool isd = p.boolean("isd", true);
  SpectatorPenaltySpec spectator;
  spectator.detunings_mhz = parse_grid(p, "spectator_grid_mhz", spectator.detunings_mhz);
  spectator.settings = ctx.settings;

  if (objective == "sq") {
    SqObjectiveOptions o;
    o.drag = p.boolean("drag", false);
    o.isd = isd;
    o.spectator = spectator;
    o.averaging.settings = ctx.settings;
    o.averaging.states = name_indices(p.strings("search_states", {}), false);
    o.averaging.gates = name_indices(p.strings("search_gates", {}), true);
    const std::string mask = p.string("mask", "physical");
    std::vector<ParamBound> def{{1.0, 2.5}, {1.0, 6.0}};
    if (o.drag) def.push_back({-3.0, 0.0});
    s.bounds = parse_bounds(p, def);
    if (p.has("initial")) s.initial = p.numbers("initial");
    p.finish();
    const SimulationModel model = single_model(ctx, parse_mask(mask));
    const ObjectiveSpec obj = sq_objective(model, o);
    const OptimizeResult r = optimize(obj, s);
    json out = trace_csv_and_json(ctx, "optimize", obj, r, s);
    // final numbers on the full averaging set
    AveragingOptions full;
    full.settings = ctx.settings;
    full.workers = ctx.workers;
    const auto pulse = sq_pulse_from(r.params, o.drag);
    out["gate_error"] = average_sq_error(model, pulse, full).mean_error;
    if (o.isd) out["isd_penalty"] = obj.isd_term(r.params);
    out["objective"] = objective;
    ctx.add_json("optimize.json", out);
    return;
  }
  if (objective != "interaction") throw ValidationError("spec: objective must be sq or interaction");

  InteractionObjectiveOptions o;
  o.isd = isd;
  o.frame_correction = p.boolean("frame_correction", false);
  o.settings = ctx.settings;
  o.spectator = spectator;
  if (p.string("search_states", "reduced") == "reduced") o.states = interaction_search_states();
  s.bounds = parse_bounds(p, {{0.8, 2.5}, {0.1, 0.6}, {5.0, 25.0}, {0.0, 4.0}, {2.0, 10.0}});
  if (p.has("initial")) s.initial = p.numbers("initial");
  const auto shifts = parse_grid(p, "shifts_mhz");
  p.finish();
  const auto res = optimize_interaction_per_shift(ctx.config.scheme, ctx.config.qubit, shifts, s, o);
  Csv csv(ctx.meta, {"dipole_shift_mhz", "gate_error", "gate_error_std", "isd_penalty", "search_score",
                     "wait_us", "t_g_us", "t_fwhm_us", "f_width_mhz", "f_scan_mhz", "omega0_mhz", "evaluations"});
  json rows = json::array();
  for (const auto& r : res) {
    csv.row({r.shift_mhz, r.gate_error, r.gate_error_std, r.isd_penalty, r.search_score, r.gate.wait_us,
             r.pulse.t_g_us, r.pulse.t_fwhm_us, r.pulse.f_width_mhz, r.pulse.f_scan_mhz, r.pulse.omega0_mhz,
             static_cast<double>(r.evaluations)});
    rows.push_back({{"dipole_shift_mhz", r.shift_mhz}, {"gate_error", r.gate_error}, {"isd_penalty", r.isd_penalty},
                    {"search_score", r.search_score}, {"wait_us", r.gate.wait_us},
                    {"params", sechscan_json(r.pulse)}, {"trace_length", r.evaluations}});
  }
  ctx.add_csv("optimize_interaction.csv", csv);
  ctx.add_json("optimize.json", {{"objective", objective}, {"rows", rows},
                                 {"budget", {{"n_starts", s.n_starts}, {"local_max_iters", s.local_max_iters},
                                             {"tolerance", s.tolerance}}}});
}

void run_sensitivity(Context& ctx, Block& p) {
  const std::string scan = p.string("scan");
  const CutGaussianParams pulse = parse_pulse(p.object("pulse"), default_sq_pulse());
  AveragingOptions avg;
  avg.settings = ctx.settings;
  avg.workers = ctx.workers;
  const SimulationModel model = single_model(ctx, parse_mask(p.string("mask", "physical")));

  if (scan == "rabi-grid") {
    const auto s0 = parse_grid(p, "s0");
    const auto s1 = parse_grid(p, "s1");
    p.finish();
    std::vector<std::pair<double, double>> grid;
    for (double a : s0) for (double b : s1) grid.emplace_back(a, b);
    const auto pts = rabi_scale_grid(model, pulse, grid, avg);
    Csv csv(ctx.meta, {"s0", "s1", "error"});
    double worst = 0.0;
    for (const auto& q : pts) {
      csv.row({q.s0, q.s1, q.error});
      worst = std::max(worst, q.error);
    }
    ctx.add_csv("sensitivity_rabi.csv", csv);
    ctx.add_json("sensitivity_rabi.json", {{"points", pts.size()}, {"max_error", worst}});
    return;
  }

  PerturbationSpec spec;
  spec.n_draws = p.integer("n_draws", 100);
  spec.osc_strength_max_dev = p.number("osc_strength_max_dev", 0.0);
  spec.splitting_max_dev_khz = p.number("splitting_max_dev_khz", 0.0);
  const auto rs = p.numbers("rabi_scale", std::vector<double>{1.0, 1.0});
  if (rs.size() != 2) throw ValidationError("spec: rabi_scale needs two entries");
  spec.rabi_scale[0] = rs[0];
  spec.rabi_scale[1] = rs[1];
  spec.seed = ctx.require_seed();
  RetunePolicy policy;
  const std::string mode = p.string("mode", "retuned");
  if (mode == "blind") {
    policy.mode = RetuneMode::Blind;
  } else if (mode != "retuned") {
    throw ValidationError("spec: mode must be blind or retuned");
  }
  policy.rabi_residual = p.number("rabi_residual", policy.rabi_residual);
  policy.freq_residual_khz = p.number("freq_residual_khz", policy.freq_residual_khz);

  if (scan == "random") {
    const std::string axis_s = p.string("axis");
    PerturbationAxis axis;
    if (axis_s == "oscillator-strength") {
      axis = PerturbationAxis::OscillatorStrength;
    } else if (axis_s == "splitting") {
      axis = PerturbationAxis::Splitting;
    } else if (axis_s == "both") {
      axis = PerturbationAxis::Both;
    } else {
      throw ValidationError("spec: axis must be oscillator-strength, splitting or both");
    }
    const auto values = parse_grid(p, "axis_values");
    p.finish();
    const ScanResult r = randomized_param_scan(model, pulse, spec, policy, axis, values, avg);
    Csv csv(ctx.meta, {"axis_value", "draw", "error"});
    for (const auto& d : r.draws) csv.row({d.axis_value, static_cast<double>(d.draw), d.error});
    ctx.add_csv("sensitivity_draws.csv", csv);
    json pts = json::array();
    for (const auto& q : r.points) {
      pts.push_back({{"axis_value", q.axis_value}, {"mean_error", q.mean_error}, {"std_error", q.std_error}});
    }
    ctx.add_json("sensitivity.json", {{"axis", axis_s}, {"mode", mode}, {"n_draws", spec.n_draws}, {"points", pts}});
    return;
  }
  if (scan != "tq") throw ValidationError("spec: scan must be rabi-grid, random or tq");
  const auto shifts = parse_grid(p, "dipole_shifts_mhz");
  TqUncertaintyOptions o;
  o.interaction_pulse = parse_sechscan(p.object("sechscan"), default_sechscan());
  o.settings = ctx.settings;
  o.workers = ctx.workers;
  p.finish();
  const auto r = tq_uncertainty_scan(ctx.config.scheme, ctx.config.qubit, shifts, spec, policy, o);
  Csv csv(ctx.meta, {"dipole_shift_mhz", "draw", "blockade_error", "interaction_error"});
  json pts = json::array();
  for (const auto& q : r) {
    for (std::size_t k = 0; k < q.blockade_draws.size(); ++k) {
      csv.row({q.shift_mhz, static_cast<double>(k), q.blockade_draws[k], q.interaction_draws[k]});
    }
    pts.push_back({{"dipole_shift_mhz", q.shift_mhz}, {"blockade_mean", q.blockade_mean},
                   {"blockade_std", q.blockade_std}, {"interaction_mean", q.interaction_mean},
                   {"interaction_std", q.interaction_std}});
  }
  ctx.add_csv("sensitivity_tq.csv", csv);
  ctx.add_json("sensitivity_tq.json", {{"mode", mode}, {"n_draws", spec.n_draws}, {"points", pts}});
}

Vector parse_initial(const std::string& label, int ions) {
  auto one = [](const std::string& n) {
    for (const auto& s : bowdrey_states()) if (s.name == n) return s.psi;
    throw ValidationError("spec: unknown initial state '" + n + "'");
  };
  const auto comma = label.find(',');
  if (ions == 1) {
    if (comma != std::string::npos) throw ValidationError("spec: single-ion initial state takes one label");
    return one(label);
  }
  if (comma == std::string::npos) throw ValidationError("spec: two-ion initial state is 'a,b'");
  return product_state(one(label.substr(0, comma)), one(label.substr(comma + 1)));
}

void run_simulate(Context& ctx, Block& p) {
  const ErrorSourceMask mask = parse_mask(p.string("mask", "physical"));
  Block g = p.object("gate");
  const std::string type = g.string("type", "sq");
  const std::string initial = p.string("initial", type == "sq" ? "0" : "+,+");
  const int every = p.integer("record_every", 1);
  if (every < 1) throw ValidationError("spec: record_every must be >= 1");

  SimulationModel model = single_model(ctx, mask);
  GateSchedule schedule;
  Matrix ideal;
  const InteractionSpec* frame = nullptr;
  InteractionSpec inter;
  json info;
  if (type == "sq") {
    double phi = 0.0, theta = 0.0;
    if (g.has("name")) {
      const std::string name = g.string("name");
      const auto gate = find_gate(name);
      if (!gate) throw ValidationError("spec: unknown gate '" + name + "'");
      phi = gate->phi;
      theta = gate->theta;
    } else {
      phi = g.number("phi");
      theta = g.number("theta");
    }
    const auto pulse = parse_pulse(p.object("pulse"), default_sq_pulse());
    schedule = sq_schedule({phi, theta, pulse}, ctx.config.qubit);
    ideal = ideal_sq_unitary(phi, theta);
    info = {{"phi", phi}, {"theta", theta}, {"pulse", pulse_json(pulse)}};
  } else {
    const double shift = p.number("dipole_shift_mhz");
    model = build_two_ion_model(ctx.config.scheme, ctx.config.qubit, DipoleCoupling{shift, {}},
                                p.number("detuning_mhz", 0.0))
                .with_mask(mask);
    TqGate gate;
    if (type == "blockade") {
      BlockadeSpec b;
      const std::string name = g.string("name", "X");
      const auto named = find_gate(name);
      if (!named) throw ValidationError("spec: unknown gate '" + name + "'");
      b.target.phi = named->phi;
      b.target.theta = named->theta;
      b.control = parse_pulse(p.object("control"), default_control_pulse());
      b.target.pulse = parse_pulse(p.object("pulse"), default_sq_pulse());
      gate = blockade_gate(b, ctx.config.qubit);
    } else if (type == "interaction") {
      inter.pulse = parse_sechscan(p.object("sechscan"), default_sechscan());
      const bool fc = g.boolean("frame_correction", false);
      if (g.has("wait_us")) {
        inter.wait_us = g.number("wait_us");
      } else {
        inter = calibrate_interaction(inter, model, fc, ctx.settings);
      }
      gate = interaction_gate(inter, ctx.config.qubit);
      frame = &inter;
      info = {{"wait_us", inter.wait_us}};
    } else {
      throw ValidationError("spec: gate type must be sq, blockade or interaction");
    }
    schedule = gate.schedule;
    ideal = gate.ideal;
  }
  std::vector<std::pair<int, int>> coh;
  if (p.has("coherences")) {
    for (const auto& c : p.raw("coherences")) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer()) {
        throw ValidationError("spec: coherences are [[i, j], ...]");
      }
      const int i = c[0].get<int>(), j = c[1].get<int>();
      if (i < 0 || j < 0 || i >= model.dimension() || j >= model.dimension()) {
        throw ValidationError("spec: coherence index out of range");
      }
      coh.emplace_back(i, j);
    }
  }
  g.finish();
  p.finish();

  const Vector psi = parse_initial(initial, model.num_ions());
  const Vector full = model.num_ions() == 1 ? embed_qubit(psi, model) : embed_two_qubit(psi, model);
  const Propagator prop(model, schedule, ctx.settings);
  const Trajectory traj = prop.trajectory(DensityMatrix::pure(full), coh, every);

  std::ostringstream body;
  traj.write_csv(body);
  Csv head(ctx.meta, {"#"});
  std::string meta_lines = head.str();
  meta_lines.erase(meta_lines.rfind("#\n"));  // keep only the metadata comment lines
  ctx.artifacts.push_back({"trajectory.csv", meta_lines + body.str()});

  Matrix rho = traj.final_state.matrix();
  if (frame) rho = apply_frame_correction(rho, *frame, model);
  const Vector target = model.num_ions() == 1 ? embed_qubit(ideal * psi, model) : embed_two_qubit(ideal * psi, model);
  json pops = json::array();
  for (int k = 0; k < model.dimension(); ++k) pops.push_back(rho(k, k).real());
  info["type"] = type;
  ctx.add_json("simulate.json", {{"gate", info}, {"initial", initial}, {"duration_us", prop.duration()},
                                 {"error", state_error(rho, target)}, {"final_populations", pops},
                                 {"steps_accepted", traj.stats.accepted},
                                 {"steps_rejected", traj.stats.rejected}});
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"simulate", "sq-error",  "benchmark", "crosstalk",
                                                 "tq-error", "optimize", "windows",   "sensitivity"};
  return kinds;
}

std::vector<Artifact> run(const json& spec, const RunOptions& options) {
  Block top(spec, "");
  std::string kind = options.kind;
  if (top.has("kind")) {
    const std::string k = top.string("kind");
    if (!kind.empty() && k != kind) {
      throw ValidationError("spec kind '" + k + "' does not match requested kind '" + kind + "'");
    }
    kind = k;
  }
  if (kind.empty()) throw ValidationError("spec: no kind given");
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw ValidationError("unknown experiment kind '" + kind + "'");
  }

  Context ctx;
  ctx.kind = kind;
  if (top.has("ion_config")) {
    std::filesystem::path path = top.string("ion_config");
    if (path.is_relative()) path = options.spec_dir / path;
    ctx.config = load_ion_config(path);
  } else {
    ctx.config = default_ion_config();
  }
  Block integ = top.object("integrator");
  ctx.settings.rel_tol = integ.number("rel_tol", ctx.settings.rel_tol);
  ctx.settings.abs_tol = integ.number("abs_tol", ctx.settings.abs_tol);
  ctx.settings.max_step_us = integ.number("max_step_us", ctx.settings.max_step_us);
  integ.finish();
  ctx.settings.validate();

  if (options.seed) {
    ctx.seed = options.seed;
  } else if (top.has("seed")) {
    const json& s = top.raw("seed");
    if (!s.is_number_unsigned()) throw ValidationError("spec: seed must be a non-negative integer");
    ctx.seed = s.get<std::uint64_t>();
  }
  int workers = options.workers.value_or(0);
  if (!options.workers && top.has("workers")) workers = top.integer("workers");
  if (workers < 0) throw ValidationError("spec: workers must be >= 0");
  ctx.workers = workers > 0 ? workers : default_worker_count();

  ctx.meta = {{"tool", "reigate"},
              {"version", REIGATE_VERSION},
              {"kind", kind},
              {"seed", ctx.seed ? json(*ctx.seed) : json(nullptr)},
              {"config_hash", ctx.config.content_hash},
              {"spec_hash", fnv1a_hex(spec.dump())},
              {"rel_tol", ctx.settings.rel_tol},
              {"abs_tol", ctx.settings.abs_tol},
              {"max_step_us", ctx.settings.max_step_us},
              {"created", options.created.empty() ? utc_now() : options.created}};
  if (kind == "sensitivity") ctx.meta["oscillator_strengths"] = "clipped to [0,1], not renormalized";
  if (kind == "optimize") ctx.meta["optimizer"] = "halton starts + nelder-mead";

  Block params = top.object("params");
  top.finish();

  if (kind == "windows") run_windows(ctx, params);
  else if (kind == "sq-error") run_sq_error(ctx, params);
  else if (kind == "benchmark") run_benchmark(ctx, params);
  else if (kind == "crosstalk") run_crosstalk(ctx, params);
  else if (kind == "tq-error") run_tq_error(ctx, params);
  else if (kind == "optimize") run_optimize(ctx, params);
  else if (kind == "sensitivity") run_sensitivity(ctx, params);
  else run_simulate(ctx, params);
  return std::move(ctx.artifacts);
}

void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> temps;
  try {
    for (const auto& a : artifacts) {
      const fs::path tmp = dir / ("." + a.name + ".partial");
      temps.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary);
      out << a.content;
      out.close();
      if (!out) throw Error("cannot write " + tmp.string());
    }
    for (std::size_t i = 0; i < artifacts.size(); ++i) fs::rename(temps[i], dir / artifacts[i].name);
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
}

json load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("spec file " + path.string() + ": " + e.what());
  }
}

json error_report(const std::string& type, const std::string& message) {
  return {{"status", "error"}, {"error", {{"type", type}, {"message", message}}}};
}

}  // namespace reigate::runner
