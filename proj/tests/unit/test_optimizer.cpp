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
#include <stdexcept>

#include "reigate/optimizer.hpp"

using namespace reigate;

namespace {

ObjectiveSpec bowl(std::vector<double> center) {
  ObjectiveSpec o;
  for (std::size_t i = 0; i < center.size(); ++i) o.names.push_back("x" + std::to_string(i));
  o.gate_term = [center](const Params& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - center[i]) * (p[i] - center[i]);
    return s;
  };
  return o;
}

}  // namespace

TEST_CASE("finds the minimum of a bowl inside the bounds") {
  SearchSpec s;
  s.bounds = {{-2, 2}, {0, 10}, {-5, 0}};
  s.n_starts = 4;
  s.local_max_iters = 400;
  s.tolerance = 1e-12;
  const auto r = optimize(bowl({0.5, 7.0, -1.0}), s);
  CHECK(r.params[0] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(r.params[1] == doctest::Approx(7.0).epsilon(1e-4));
  CHECK(r.params[2] == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(r.score < 1e-8);
  CHECK(r.starts.size() == 4);
}

TEST_CASE("a minimum outside the box ends on the boundary") {
  SearchSpec s;
  s.bounds = {{0, 1}, {0, 1}};
  s.n_starts = 3;
  const auto r = optimize(bowl({2.0, 0.5}), s);
  CHECK(r.params[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.params[1] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("same seed, same trace; different seed, different starts") {
  SearchSpec s;
  s.bounds = {{-1, 1}, {-1, 1}};
  s.n_starts = 5;
  s.local_max_iters = 30;
  s.seed = 11;
  const auto a = optimize(bowl({0.3, -0.2}), s);
  s.workers = 3;
  const auto b = optimize(bowl({0.3, -0.2}), s);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].params == b.trace[i].params);
    CHECK(a.trace[i].score == b.trace[i].score);
  }
  s.seed = 12;
  const auto c = optimize(bowl({0.3, -0.2}), s);
  CHECK(c.starts != a.starts);
}

TEST_CASE("initial guess becomes the first start; pinned parameters stay put") {
  SearchSpec s;
  s.bounds = {{0, 1}, {0.25, 0.25}};
  s.n_starts = 2;
  s.initial = {0.9, 0.25};
  const auto r = optimize(bowl({0.1, 0.8}), s);
  CHECK(r.starts[0] == Params{0.9, 0.25});
  for (const auto& e : r.trace) CHECK(e.params[1] == 0.25);
  CHECK(r.params[0] == doctest::Approx(0.1).epsilon(1e-3));
}

TEST_CASE("failed evaluations are recorded, not fatal") {
  ObjectiveSpec o = bowl({0.2});
  auto inner = o.gate_term;
  o.gate_term = [inner](const Params& p) {
    if (p[0] > 0.6) throw std::runtime_error("boom");
    return inner(p);
  };
  SearchSpec s;
  s.bounds = {{0, 1}};
  s.n_starts = 3;
  s.initial = {0.9};
  const auto r = optimize(o, s);
  bool saw_failure = false;
  for (const auto& e : r.trace) {
    if (e.failed) {
      saw_failure = true;
      CHECK(std::isinf(e.score));
    }
  }
  CHECK(saw_failure);
  CHECK(r.params[0] == doctest::Approx(0.2).epsilon(1e-3));
}

TEST_CASE("dual objective scores the sum of both terms") {
  ObjectiveSpec o = bowl({0.0});
  o.isd_term = [](const Params& p) { return 2.0 * p[0]; };
  CHECK(o.dual());
  CHECK(score(o, {1.5}) == doctest::Approx(1.5 * 1.5 + 3.0));
}

TEST_CASE("search spec validation") {
  SearchSpec s;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.bounds = {{1, 0}};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.bounds = {{0, 1}};
  s.n_starts = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.n_starts = 1;
  s.initial = {2.0};
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("halton points: unit cube, low discrepancy, seeded shift") {
  const auto pts = halton_points(256, 3, 5);
  REQUIRE(pts.size() == 256);
  double mean[3] = {0, 0, 0};
  for (const auto& p : pts) {
    REQUIRE(p.size() == 3);
    for (int d = 0; d < 3; ++d) {
      CHECK(p[d] >= 0.0);
      CHECK(p[d] < 1.0);
      mean[d] += p[d] / 256;
    }
  }
  for (double m : mean) CHECK(m == doctest::Approx(0.5).epsilon(0.02));
  CHECK(halton_points(4, 2, 5) == halton_points(4, 2, 5));
  CHECK(halton_points(4, 2, 5) != halton_points(4, 2, 6));
  CHECK_THROWS_AS(halton_points(4, 17, 1), ValidationError);
}

TEST_CASE("parameter mappings") {
  const auto p = sq_pulse_from({1.68, 4.16}, false);
  CHECK(p.target_area == doctest::Approx(kPi / std::sqrt(2.0)));
  CHECK(p.drag_alpha_y_s == 0.0);
  const auto d = sq_pulse_from({0.77, 1.4, -1.46}, true);
  CHECK(d.drag_alpha_y_s == doctest::Approx(-1.46e-9));
  const auto s = sechscan_from({1.7, 0.28, 9.5, 2.2, 5.8});
  CHECK(s.t_fwhm_us == 0.28);
  CHECK(s.omega0_mhz == 5.8);
  CHECK(interaction_search_states().size() == 1);
  CHECK(std::abs(interaction_search_states()[0].norm() - 1.0) < 1e-12);
}

TEST_CASE("SQ objective ranks the reference optimum above a crosstalk-heavy pulse") {
  const IonConfig cfg = default_ion_config();
  const auto model = SimulationModel::single_ion(cfg.scheme, cfg.qubit);
  SqObjectiveOptions o;
  o.averaging.states = {0, 2};
  o.averaging.gates = {0, 3};
  const auto obj = sq_objective(model, o);
  CHECK(obj.dual());
  CHECK(obj.names.size() == 2);
  CHECK(score(obj, {1.68, 4.16}) < score(obj, {0.3, 4.0}));
}
