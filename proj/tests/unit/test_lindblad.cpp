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

#include "reigate/gate_schemes.hpp"
#include "reigate/lindblad.hpp"
#include "reigate/metrics.hpp"

using namespace reigate;

namespace {

SimulationModel single(ErrorSourceMask mask) {
  const IonConfig cfg = default_ion_config();
  return SimulationModel::single_ion(cfg.scheme, cfg.qubit).with_mask(mask);
}

GateSchedule one_tone(double area, double tg = 1.0, double sigma = 2.0) {
  GateSchedule g;
  g.add_pulse({make_tone(0, {"1/2g", "5/2e"}, CutGaussianParams::make(tg, sigma, area))});
  return g;
}

}  // namespace

TEST_CASE("resonant two-level Rabi: excited population is sin^2(area/2)") {
  const auto model = single(ErrorSourceMask::ideal());
  const auto& q = model.ion(0).levels;
  for (double area : {kPi / 2, kPi, 2.2, 3 * kPi}) {
    const Propagator prop(model, one_tone(area), IntegratorSettings::with_tolerance(1e-11));
    const DensityMatrix out = prop.evolve(DensityMatrix::basis(6, q.q0));
    const double s = std::sin(area / 2);
    CHECK(std::abs(out.population(q.e) - s * s) < 1e-6);
    CHECK(std::abs(out.population(q.q0) - (1 - s * s)) < 1e-6);
  }
}

TEST_CASE("exponential decay: population, branching and coherence") {
  const auto model = single(ErrorSourceMask::physical());
  const auto& s = model.ion(0).scheme;
  const auto& q = model.ion(0).levels;
  const double t1 = seconds_to_us(s.t1_optical_s), t2 = seconds_to_us(s.t2_optical_s);
  const double t = 500.0;
  GateSchedule wait;
  wait.add_wait(t);
  const Propagator prop(model, wait, IntegratorSettings::with_tolerance(1e-10));

  const DensityMatrix out = prop.evolve(DensityMatrix::basis(6, q.e));
  const double pe = std::exp(-t / t1);
  CHECK(std::abs(out.population(q.e) - pe) < 1e-6);
  double column = 0.0;
  for (int g = 0; g < 3; ++g) column += s.strength(g, q.e_excited);
  for (int g = 0; g < 3; ++g) {
    CHECK(std::abs(out.population(g) - (1 - pe) * s.strength(g, q.e_excited) / column) < 1e-6);
  }

  Vector psi = Vector::Zero(6);
  psi(q.q0) = psi(q.e) = 1 / std::sqrt(2.0);
  const DensityMatrix sup = prop.evolve(DensityMatrix::pure(psi));
  CHECK(std::abs(std::abs(sup.matrix()(q.q0, q.e)) - 0.5 * std::exp(-t / t2)) < 1e-6);
}

TEST_CASE("density matrix invariants survive a driven, dissipative run") {
  const auto model = single(ErrorSourceMask::physical());
  const auto settings = IntegratorSettings::with_tolerance(1e-8);
  const auto sched = sq_schedule({0.3, 1.1, default_sq_pulse()}, model.ion(0).qubit);
  Matrix rho0 = Matrix::Zero(6, 6);
  rho0(2, 2) = 0.6;
  rho0(1, 1) = 0.3;
  rho0(0, 0) = 0.1;
  rho0(1, 2) = rho0(2, 1) = 0.2;
  const Propagator prop(model, sched, settings);
  const Matrix rho = prop.evolve(DensityMatrix(rho0)).matrix();
  const DensityMatrix d(rho);
  CHECK(std::abs(d.trace().real() - 1.0) < 10 * settings.rel_tol);
  CHECK(std::abs(d.trace().imag()) < 1e-12);
  CHECK(d.hermiticity_defect() < 10 * settings.rel_tol);
  CHECK(d.min_eigenvalue() > -10 * settings.rel_tol);
  CHECK_NOTHROW(check_density_matrix(rho, settings.rel_tol, "test"));
  CHECK(d.purity() <= 1.0 + 1e-9);
}

TEST_CASE("check_density_matrix rejects broken states") {
  Matrix bad = Matrix::Identity(2, 2) * 0.7;
  CHECK_THROWS_AS(check_density_matrix(bad, 1e-6), IntegrationError);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(check_density_matrix(neg, 1e-6), IntegrationError);
}

TEST_CASE("pure-state and density evolution agree without dissipation") {
  const auto model = single(ErrorSourceMask::crosstalk_only());
  const auto sched = sq_schedule({0.0, kPi, default_sq_pulse()}, model.ion(0).qubit);
  const auto settings = IntegratorSettings::with_tolerance(1e-10);
  const Propagator prop(model, sched, settings);
  CHECK_FALSE(prop.has_dissipation());
  Vector psi = Vector::Zero(6);
  psi(2) = 0.6;
  psi(1) = Complex(0.0, 0.8);
  const Matrix col = prop.evolve_pure(psi);
  const Matrix rho = prop.evolve(DensityMatrix::pure(psi)).matrix();
  CHECK((rho - col * col.adjoint()).norm() < 1e-8);
  CHECK(std::abs(col.norm() - 1.0) < 1e-8);
}

TEST_CASE("process map reproduces direct evolution on the qubit subspace") {
  const auto model = single(ErrorSourceMask::physical());
  const auto sched = sq_schedule({0.5, kPi / 2, default_sq_pulse()}, model.ion(0).qubit);
  const Propagator prop(model, sched, IntegratorSettings::with_tolerance(1e-9));
  const auto sub = qubit_subspace(model);
  const ProcessMap map = prop.process(sub);
  Matrix r2(2, 2);
  r2 << 0.5, Complex(0.3, 0.1), Complex(0.3, -0.1), 0.5;
  Matrix full = Matrix::Zero(6, 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) full(sub[i], sub[j]) = r2(i, j);
  const Matrix direct = prop.evolve(DensityMatrix(full)).matrix();
  CHECK((map.apply(r2) - direct).norm() < 1e-7);
}

TEST_CASE("trajectory records segment ends and the final state") {
  const auto model = single(ErrorSourceMask::physical());
  GateSchedule g = one_tone(kPi);
  g.add_wait(2.0);
  const Propagator prop(model, g);
  const Trajectory tr = prop.trajectory(DensityMatrix::basis(6, 2), {{2, 5}}, 10);
  REQUIRE(tr.samples.size() >= 3);
  CHECK(tr.samples.front().t_us == 0.0);
  CHECK(tr.samples.back().t_us == doctest::Approx(3.0));
  CHECK(tr.samples.back().coherences.size() == 1);
  CHECK(tr.samples.back().populations[5] == doctest::Approx(tr.final_state.population(5)));
  CHECK(tr.stats.accepted > 0);
}

TEST_CASE("integrator settings are validated") {
  IntegratorSettings s;
  s.rel_tol = -1;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  IntegratorSettings cap = IntegratorSettings::with_tolerance(1e-6);
  cap.max_steps = 5;
  const auto model = single(ErrorSourceMask::physical());
  const Propagator prop(model, one_tone(kPi), cap);
  CHECK_THROWS_AS(prop.evolve(DensityMatrix::basis(6, 2)), IntegrationError);
}
