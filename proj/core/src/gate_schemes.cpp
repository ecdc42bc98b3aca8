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

#include "reigate/gate_schemes.hpp"

#include <cmath>

namespace reigate {

CutGaussianParams default_sq_pulse() {
  return CutGaussianParams::make(1.68, 4.16, kPi / std::sqrt(2.0));
}

CutGaussianParams default_control_pulse() { return CutGaussianParams::make(2.17, 6.75, kPi); }

SechscanParams default_sechscan() { return SechscanParams::make(1.7, 0.28, 9.5, 2.2, 5.8); }

void append_sq_gate(GateSchedule& schedule, const SqGateSpec& spec, const QubitAssignment& qubit,
                    int ion) {
  schedule.set_frame_level(ion, qubit.q1);
  const TransitionRef t0{qubit.q0, qubit.e};
  const TransitionRef t1{qubit.q1, qubit.e};
  const double shift = kPi - spec.theta;
  schedule.add_pulse({make_tone(ion, t0, spec.pulse, 0.0), make_tone(ion, t1, spec.pulse, spec.phi)});
  schedule.add_pulse({make_tone(ion, t0, spec.pulse, shift),
                      make_tone(ion, t1, spec.pulse, spec.phi + shift)});
}

GateSchedule sq_schedule(const SqGateSpec& spec, const QubitAssignment& qubit, int ion) {
  GateSchedule s(ion == 0 ? TargetIon::A : TargetIon::B);
  append_sq_gate(s, spec, qubit, ion);
  return s;
}

Vector bright_state(double phi) {
  Vector v(2);
  v << 1.0, std::polar(1.0, -phi);
  return v / std::sqrt(2.0);
}

Vector dark_state(double phi) {
  Vector v(2);
  v << 1.0, -std::polar(1.0, -phi);
  return v / std::sqrt(2.0);
}

Matrix ideal_sq_unitary(double phi, double theta) {
  const Vector b = bright_state(phi);
  const Vector d = dark_state(phi);
  return std::polar(1.0, theta) * b * b.adjoint() + d * d.adjoint();
}

const std::vector<NamedGate>& benchmark_gates() {
  static const std::vector<NamedGate> gates = {
      {"I", 0.0, 0.0},
      {"X", 0.0, kPi},
      {"sqrtX", kPi, kPi / 2},
      {"sqrt-X", 0.0, kPi / 2},
      {"sqrtY", kPi / 2, kPi / 2},
      {"sqrt-Y", 3 * kPi / 2, kPi / 2},
  };
  return gates;
}

std::optional<NamedGate> find_gate(std::string_view name) {
  for (const auto& g : benchmark_gates()) {
    if (g.name == name) return g;
  }
  return std::nullopt;
}

GateSchedule virtual_z(GateSchedule schedule, double angle, int ion) {
  schedule.rotate_frame(ion, angle);
  return schedule;
}

namespace {
Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}
}  // namespace

TqGate blockade_gate(const BlockadeSpec& spec, const QubitAssignment& qubit) {
  if (std::abs(spec.control.target_area - kPi) > 1e-12) {
    throw ValidationError("blockade: control pulse area must be pi");
  }
  TqGate gate;
  gate.schedule.set_target(TargetIon::Both);
  const TransitionRef ctrl{qubit.q0, qubit.e};
  gate.schedule.add_pulse({make_tone(0, ctrl, spec.control, 0.0)});
  append_sq_gate(gate.schedule, spec.target, qubit, 1);
  gate.schedule.add_pulse({make_tone(0, ctrl, spec.control, kPi)});

  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  Matrix p1 = Matrix::Zero(2, 2);
  p1(1, 1) = 1.0;
  gate.ideal = kron(p0, Matrix::Identity(2, 2)) + kron(p1, ideal_sq_unitary(spec.target.phi, spec.target.theta));
  return gate;
}

TqGate interaction_gate(const InteractionSpec& spec, const QubitAssignment& qubit) {
  if (spec.wait_us < 0.0) throw ValidationError("interaction gate: wait must be non-negative");
  TqGate gate;
  gate.schedule.set_target(TargetIon::Both);
  const TransitionRef line{qubit.q0, qubit.e};
  gate.schedule.add_pulse({make_tone(0, line, spec.pulse, 0.0), make_tone(1, line, spec.pulse, 0.0)});
  gate.schedule.add_wait(spec.wait_us);
  gate.schedule.add_pulse({make_tone(0, line, spec.pulse, kPi), make_tone(1, line, spec.pulse, kPi)});
  gate.ideal = Matrix::Identity(4, 4);
  gate.ideal(0, 0) = -1.0;
  return gate;
}

double wait_for_phase(double phi_d, double delta_nu_mhz) {
  if (delta_nu_mhz == 0.0 || !std::isfinite(delta_nu_mhz)) {
    throw ValidationError("calibrate_wait: dipole shift must be nonzero");
  }
  // The |ee> branch evolves as exp(-i 2 pi dnu t).
  const double rate = -kTwoPi * delta_nu_mhz;
  const double needed = kPi - phi_d;
  const double residue = wrap_phase(rate > 0 ? needed : -needed);
  return residue / std::abs(rate);
}

std::vector<int> qubit_subspace(const SimulationModel& model) {
  const auto& a = model.ion(0).levels;
  if (model.num_ions() == 1) return {a.q0, a.q1};
  const auto& b = model.ion(1).levels;
  return {model.product_index(a.q0, b.q0), model.product_index(a.q0, b.q1),
          model.product_index(a.q1, b.q0), model.product_index(a.q1, b.q1)};
}

Vector embed_qubit(const Vector& psi, const SimulationModel& model) {
  if (psi.size() != 2) throw ValidationError("embed_qubit: expected a 2-vector");
  Vector out = Vector::Zero(model.dimension());
  const auto idx = qubit_subspace(model);
  if (idx.size() != 2) throw ValidationError("embed_qubit: single-ion model required");
  out(idx[0]) = psi(0);
  out(idx[1]) = psi(1);
  return out;
}

Vector embed_two_qubit(const Vector& psi, const SimulationModel& model) {
  if (psi.size() != 4) throw ValidationError("embed_two_qubit: expected a 4-vector");
  const auto idx = qubit_subspace(model);
  if (idx.size() != 4) throw ValidationError("embed_two_qubit: two-ion model required");
  Vector out = Vector::Zero(model.dimension());
  for (int k = 0; k < 4; ++k) out(idx[static_cast<std::size_t>(k)]) = psi(k);
  return out;
}

Matrix apply_frame_correction(const Matrix& rho, const InteractionSpec& spec,
                              const SimulationModel& model) {
  if (spec.frame_correction[0] == 0.0 && spec.frame_correction[1] == 0.0) return rho;
  Vector phase = Vector::Ones(model.dimension());
  const int na = model.levels_per_ion(0);
  const int nb = model.levels_per_ion(1);
  const int qa = model.ion(0).levels.q1;
  const int qb = model.ion(1).levels.q1;
  for (int a = 0; a < na; ++a) {
    for (int b = 0; b < nb; ++b) {
      double angle = 0.0;
      if (a == qa) angle += spec.frame_correction[0];
      if (b == qb) angle += spec.frame_correction[1];
      phase(model.product_index(a, b)) = std::polar(1.0, angle);
    }
  }
  return phase.asDiagonal() * rho * phase.conjugate().asDiagonal();
}

namespace {

Matrix run_no_wait(InteractionSpec spec, const SimulationModel& model, const Vector& psi4,
                   const IntegratorSettings& settings) {
  if (model.num_ions() != 2) throw ValidationError("interaction gate needs a two-ion model");
  spec.wait_us = 0.0;
  const TqGate gate = interaction_gate(spec, model.ion(0).qubit);
  const Vector psi = embed_two_qubit(psi4, model);
  const Propagator prop(model, gate.schedule, settings);
  return prop.evolve(DensityMatrix::pure(psi)).matrix();
}

}  // namespace

double calibrate_wait(const InteractionSpec& spec, const SimulationModel& model,
                      const IntegratorSettings& settings) {
  if (model.dipole_shift_mhz() == 0.0) {
    throw ValidationError("calibrate_wait: dipole shift must be nonzero");
  }
  Vector psi4 = Vector::Zero(4);
  psi4(0) = psi4(1) = 1.0 / std::sqrt(2.0);
  const Matrix rho = run_no_wait(spec, model, psi4, settings);
  const auto idx = qubit_subspace(model);
  // rho(00, 01) = c00 conj(c01)
  const double phi_d = std::arg(rho(idx[0], idx[1]));
  return wait_for_phase(phi_d, model.dipole_shift_mhz());
}

InteractionSpec calibrate_interaction(InteractionSpec spec, const SimulationModel& model,
                                      bool frame_correction, const IntegratorSettings& settings) {
  if (model.dipole_shift_mhz() == 0.0) {
    throw ValidationError("calibrate_wait: dipole shift must be nonzero");
  }
  if (!frame_correction) {
    spec.frame_correction[0] = spec.frame_correction[1] = 0.0;
    spec.wait_us = calibrate_wait(spec, model, settings);
    return spec;
  }
  const Vector psi4 = Vector::Constant(4, 0.5);
  const Matrix rho = run_no_wait(spec, model, psi4, settings);
  const auto idx = qubit_subspace(model);
  // Phases relative to |11>: arg(c_x c11^*) = arg rho(x, 11).
  const double p00 = std::arg(rho(idx[0], idx[3]));
  const double p01 = std::arg(rho(idx[1], idx[3]));
  const double p10 = std::arg(rho(idx[2], idx[3]));
  // Correcting |1> of A by z_A and of B by z_B shifts the |11> reference by
  // both, |01> (A in 0) by z_B and |10> by z_A.
  const double z_a = p01;
  const double z_b = p10;
  spec.frame_correction[0] = z_a;
  spec.frame_correction[1] = z_b;
  // After correction |00> sits at p00 - z_a - z_b relative to |11>.
  spec.wait_us = wait_for_phase(p00 - z_a - z_b, model.dipole_shift_mhz());
  return spec;
}

}  // namespace reigate
