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

bool is_unitary(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() < 1e-12;
}

}  // namespace

TEST_CASE("benchmark gate set and ideal unitaries") {
  const auto& gates = benchmark_gates();
  CHECK(gates.size() == 6);
  for (const auto& g : gates) {
    CHECK(is_unitary(ideal_sq_unitary(g.phi, g.theta)));
    CHECK(find_gate(g.name).has_value());
  }
  CHECK_FALSE(find_gate("nope").has_value());
  const auto x = find_gate("X");
  REQUIRE(x);
  const Matrix u = ideal_sq_unitary(x->phi, x->theta);
  CHECK(std::abs(std::abs(u(1, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(u(0, 0)) < 1e-12);
}

TEST_CASE("bright and dark states form an orthonormal basis") {
  for (double phi : {0.0, 0.7, kPi}) {
    const Vector b = bright_state(phi), d = dark_state(phi);
    CHECK(std::abs(b.norm() - 1.0) < 1e-12);
    CHECK(std::abs(d.norm() - 1.0) < 1e-12);
    CHECK(std::abs(b.dot(d)) < 1e-12);
  }
  // theta adds a phase to the bright component only
  const double phi = 0.4, theta = 1.3;
  const Matrix u = ideal_sq_unitary(phi, theta);
  CHECK((u * bright_state(phi) - std::exp(kI * theta) * bright_state(phi)).norm() < 1e-12);
  CHECK((u * dark_state(phi) - dark_state(phi)).norm() < 1e-12);
}

TEST_CASE("SQ gates are exact without decay and crosstalk") {
  const IonConfig cfg = default_ion_config();
  const auto model = SimulationModel::single_ion(cfg.scheme, cfg.qubit).with_mask(ErrorSourceMask::ideal());
  AveragingOptions o;
  o.settings = IntegratorSettings::with_tolerance(1e-10);
  const ErrorReport r = average_sq_error(model, default_sq_pulse(), o);
  CHECK(r.samples.size() == 36);
  CHECK(r.mean_error < 1e-7);
}

TEST_CASE("SQ schedule layout and default durations") {
  const auto s = sq_schedule({0.0, kPi, default_sq_pulse()});
  CHECK(s.total_duration() == doctest::Approx(2 * 1.68));
  const auto b = blockade_gate(BlockadeSpec{});
  CHECK(b.schedule.total_duration() == doctest::Approx(7.7).epsilon(1e-12));
  CHECK(b.ideal.rows() == 4);
  CHECK(is_unitary(b.ideal));
}

TEST_CASE("virtual z shifts the phase of later |1> tones") {
  GateSchedule g = sq_schedule({0.0, kPi, default_sq_pulse()});
  const double before = g.frame_phase(0);
  g = virtual_z(g, 0.5);
  CHECK(g.frame_phase(0) == doctest::Approx(wrap_phase(before + 0.5)));
  CHECK(g.total_duration() == doctest::Approx(2 * 1.68));
}

TEST_CASE("interaction gate: wait, ideal phase and calibration") {
  const auto inter = interaction_gate(InteractionSpec{default_sechscan(), 0.2, {0.0, 0.0}});
  CHECK(inter.schedule.total_duration() == doctest::Approx(2 * default_sechscan().t_g_us + 0.2));
  // pi phase on |00> only
  Matrix expect = Matrix::Identity(4, 4);
  expect(0, 0) = -1.0;
  CHECK((inter.ideal - expect).norm() < 1e-12);

  const IonConfig cfg = default_ion_config();
  const auto model = build_two_ion_model(cfg.scheme, cfg.qubit, DipoleCoupling{3.0, {}});
  const InteractionSpec cal = calibrate_interaction(InteractionSpec{default_sechscan(), 0.0, {0.0, 0.0}}, model, false,
                                                    IntegratorSettings::with_tolerance(1e-7));
  CHECK(cal.wait_us >= 0.0);
  CHECK(cal.wait_us < 1.0 / 3.0 + 1e-9);  // less than one full phase period
  CHECK_THROWS_AS(wait_for_phase(1.0, 0.0), ValidationError);
  CHECK(wait_for_phase(kPi, 3.0) >= 0.0);
}

TEST_CASE("embedding puts qubit amplitudes on the q0 and q1 levels") {
  const IonConfig cfg = default_ion_config();
  const auto m1 = SimulationModel::single_ion(cfg.scheme, cfg.qubit);
  Vector psi(2);
  psi << 0.6, 0.8;
  const Vector e = embed_qubit(psi, m1);
  CHECK(e(m1.ion(0).levels.q0) == Complex(0.6));
  CHECK(e(m1.ion(0).levels.q1) == Complex(0.8));
  const auto m2 = build_two_ion_model(cfg.scheme, cfg.qubit, DipoleCoupling{1.0, {}});
  Vector two = Vector::Zero(4);
  two(1) = 1.0;  // |0>_A |1>_B
  const Vector e2 = embed_two_qubit(two, m2);
  CHECK(e2(m2.product_index(m2.ion(0).levels.q0, m2.ion(1).levels.q1)) == Complex(1.0));
  CHECK(qubit_subspace(m2).size() == 4);
}
