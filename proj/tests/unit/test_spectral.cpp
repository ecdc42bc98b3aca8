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
#include <doctest.h>

#include <cmath>
#include <limits>

#include "reigate/spectral.hpp"

using namespace reigate;

namespace {

// Independent brute-force windows: sample ion offsets on a fine grid, park
// each ion in the ground state farthest from both qubit lines, and record the
// closest parked line on either side of each qubit line.
WindowReport brute_force_windows(const LevelScheme& s, const QubitLevels& q, double span, double step) {
  const double l0 = s.transition_mhz(q.q0_ground, q.e_excited);
  const double l1 = s.transition_mhz(q.q1_ground, q.e_excited);
  std::vector<int> order{q.q0_ground, q.q1_ground};
  for (int g = 0; g < s.num_ground(); ++g)
    if (g != q.q0_ground && g != q.q1_ground) order.push_back(g);
  WindowReport w;
  w.window_0 = {-1e300, 1e300};
  w.window_1 = {-1e300, 1e300};
  const long n = std::lround(span / step);
  for (long k = 0; k <= n; ++k) {
    const double x = -span / 2 + step * static_cast<double>(k);
    int best = -1;
    double best_d = -1.0;
    for (int g : order) {
      double d = std::numeric_limits<double>::infinity();
      for (int e = 0; e < s.num_excited(); ++e) {
        const double line = x + s.transition_mhz(g, e);
        d = std::min({d, std::abs(line - l0), std::abs(line - l1)});
      }
      if (d > best_d + 1e-9) {
        best_d = d;
        best = g;
      }
    }
    for (int e = 0; e < s.num_excited(); ++e) {
      const double line = x + s.transition_mhz(best, e);
      for (auto [ref, win] : {std::pair{l0, &w.window_0}, {l1, &w.window_1}}) {
        const double rel = line - ref;
        if (rel > 0) win->high = std::min(win->high, rel);
        if (rel < 0) win->low = std::max(win->low, rel);
      }
    }
  }
  return w;
}

}  // namespace

TEST_CASE("transmission windows agree with a brute-force scan") {
  const IonConfig cfg = default_ion_config();
  const auto q = resolve(cfg.scheme, cfg.qubit);
  const auto exact = compute_transmission_windows(cfg.scheme, cfg.qubit, 3000.0);
  const auto brute = brute_force_windows(cfg.scheme, q, 3000.0, 0.005);
  const double step_slack = 0.011;
  CHECK(std::abs(exact.window_0.low - brute.window_0.low) < step_slack);
  CHECK(std::abs(exact.window_0.high - brute.window_0.high) < step_slack);
  CHECK(std::abs(exact.window_1.low - brute.window_1.low) < step_slack);
  CHECK(std::abs(exact.window_1.high - brute.window_1.high) < step_slack);
  CHECK(exact.window_0.width() > 0.0);
  CHECK(exact.window_1.width() > 0.0);
}

TEST_CASE("fewer ions never narrow a window") {
  const IonConfig cfg = default_ion_config();
  const auto full = compute_transmission_windows(cfg.scheme, cfg.qubit, 3000.0);
  for (double span : {1.0, 20.0, 100.0, 600.0}) {
    const auto w = compute_transmission_windows(cfg.scheme, cfg.qubit, span);
    CHECK(w.window_0.low <= full.window_0.low + 1e-12);
    CHECK(w.window_0.high >= full.window_0.high - 1e-12);
    CHECK(w.window_1.low <= full.window_1.low + 1e-12);
    CHECK(w.window_1.high >= full.window_1.high - 1e-12);
  }
  CHECK_THROWS_AS(compute_transmission_windows(cfg.scheme, cfg.qubit, -1.0), ValidationError);
}

TEST_CASE("scaling exponent of an exact power law") {
  std::vector<double> d{1000, 2000, 5000, 10000}, e2, e1;
  for (double x : d) {
    e2.push_back(3.0 * std::pow(x, -2.0));
    e1.push_back(0.5 * std::pow(x, -1.0));
  }
  CHECK(fit_scaling_exponent(e2, d) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit_scaling_exponent(e1, d) == doctest::Approx(-1.0).epsilon(1e-12));
  std::vector<double> neg{-1000, -2000, -5000, -10000};
  CHECK(fit_scaling_exponent(e2, neg) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_scaling_exponent({1.0, 0.0}, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(fit_scaling_exponent({1.0}, {1.0, 2.0}), ValidationError);
}

TEST_CASE("crosstalk scan validation") {
  CrosstalkScanSpec s;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.detunings_mhz = {100.0};
  CHECK_NOTHROW(s.validate());
  s.aux = false;
  s.qubit_states = false;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.aux = true;
  s.mode = CrosstalkMode::Parallel;
  s.idle_gate = "nope";
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("aux spike appears where B's |1> line meets A's aux transition") {
  const IonConfig cfg = default_ion_config();
  const auto& s = cfg.scheme;
  const auto q = resolve(s, cfg.qubit);
  // B's |1>->e tone at Delta + line1 hits A's aux->e line
  const double resonance = s.transition_mhz(q.aux_ground, q.e_excited) - s.transition_mhz(q.q1_ground, q.e_excited);
  CHECK(resonance == doctest::Approx(119.2));
  const auto model = SimulationModel::single_ion(s, cfg.qubit).with_mask(ErrorSourceMask::crosstalk_only());
  CrosstalkScanSpec spec;
  spec.detunings_mhz = {resonance, resonance + 40.0};
  spec.qubit_states = false;
  spec.reverse = false;
  spec.settings = IntegratorSettings::with_tolerance(1e-8);
  const auto pts = crosstalk_scan(model, spec);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].delta_mhz == doctest::Approx(resonance));
  CHECK(pts[0].aux_error > 0.05);
  CHECK(pts[0].aux_error > 100 * pts[1].aux_error);
}

TEST_CASE("sequential crosstalk falls off with detuning") {
  const IonConfig cfg = default_ion_config();
  const auto model = SimulationModel::single_ion(cfg.scheme, cfg.qubit).with_mask(ErrorSourceMask::crosstalk_only());
  CrosstalkScanSpec spec;
  spec.detunings_mhz = {700.0, 2000.0};
  spec.aux = false;
  spec.settings = IntegratorSettings::with_tolerance(1e-10);
  const auto pts = crosstalk_scan(model, spec);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].mean_error > pts[1].mean_error);
  CHECK(pts[1].mean_error > 0.0);
  CHECK(pts[0].reverse_mean_error > 0.0);
}

TEST_CASE("spectator penalty") {
  const auto grid = SpectatorPenaltySpec::grid(-11.0, -9.0, 5);
  CHECK(grid.detunings_mhz == SpectatorPenaltySpec{}.detunings_mhz);
  SpectatorPenaltySpec narrow;
  narrow.detunings_mhz = {-10.0, -10.1, -10.2, -10.3, -10.4};
  CHECK_THROWS_AS(narrow.validate(), ValidationError);

  const IonConfig cfg = default_ion_config();
  CHECK(spectator_penalty(GateSchedule{}, SpectatorPenaltySpec{}, cfg.scheme).penalty == 0.0);
  const auto sq = sq_schedule({0.0, kPi, default_sq_pulse()}, cfg.qubit);
  const auto p = spectator_penalty(sq, SpectatorPenaltySpec{}, cfg.scheme);
  CHECK(p.penalty > 0.0);
  CHECK(p.penalty < 1e-2);
  CHECK(p.per_detuning.size() == 5);
  // a shorter pulse has a wider spectrum and disturbs spectators more
  const auto fast = sq_schedule({0.0, kPi, CutGaussianParams::make(0.4, 1.0, kPi / std::sqrt(2.0))}, cfg.qubit);
  CHECK(spectator_penalty(fast, SpectatorPenaltySpec{}, cfg.scheme).penalty > p.penalty);
}
