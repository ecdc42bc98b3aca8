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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "reigate/common.hpp"
#include "reigate/ion_model.hpp"
#include "reigate/pulse_shapes.hpp"

namespace reigate {

struct IntegratorSettings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  /// Upper bound on the step (us); 0 means the segment length.
  double max_step_us = 0.0;
  std::uint64_t max_steps = 200'000'000;

  void validate() const;
  static IntegratorSettings with_tolerance(double tol) { return {tol, tol, 0.0, 200'000'000}; }
};

struct IntegrationStats {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t rhs_evaluations = 0;

  IntegrationStats& operator+=(const IntegrationStats& o) {
    accepted += o.accepted;
    rejected += o.rejected;
    rhs_evaluations += o.rhs_evaluations;
    return *this;
  }
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Matrix rho);

  static DensityMatrix pure(const Vector& psi);
  /// Basis state |k><k| in dimension `dim`.
  static DensityMatrix basis(int dim, int k);

  const Matrix& matrix() const { return rho_; }
  Matrix& matrix() { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

  Complex trace() const { return rho_.trace(); }
  double purity() const;
  double population(int k) const { return rho_(k, k).real(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;

 private:
  Matrix rho_;
};

/// Throws IntegrationError if `rho` violates the state invariants for a run
/// performed with relative tolerance `rel_tol`.
void check_density_matrix(const Matrix& rho, double rel_tol, std::string_view context = {});

/// Dense Hamiltonian (rad/us) in the interaction picture at time t, without
/// the anti-Hermitian decay part. Intended for inspection and tests.
Matrix assemble_hamiltonian(const SimulationModel& model, const GateSchedule& schedule, double t_us);

struct TrajectorySample {
  double t_us = 0.0;
  std::vector<double> populations;
  std::vector<Complex> coherences;
};

struct Trajectory {
  std::vector<std::pair<int, int>> coherence_indices;
  std::vector<TrajectorySample> samples;
  DensityMatrix final_state;
  IntegrationStats stats;

  void write_csv(std::ostream& out) const;
};

/// Linear map on operators supported in a subspace of the full space.
struct ProcessMap {
  std::vector<int> subspace;
  /// Images of the Hermitian basis: E_ii, then for i<j E_ij+E_ji and i(E_ij-E_ji).
  std::vector<Matrix> images;

  /// Image of an m x m operator given in subspace coordinates.
  Matrix apply(const Matrix& rho_sub) const;
  int dim() const { return images.empty() ? 0 : static_cast<int>(images.front().rows()); }
};

/// Compiled schedule bound to a model. Immutable; evolve() is reentrant.
class Propagator {
 public:
  Propagator(const SimulationModel& model, const GateSchedule& schedule,
             IntegratorSettings settings = {});
  ~Propagator();
  Propagator(Propagator&&) noexcept;
  Propagator& operator=(Propagator&&) noexcept;

  int dimension() const;
  double duration() const;
  const IntegratorSettings& settings() const;

  /// Evolves a batch of Hermitian operators through the schedule.
  std::vector<Matrix> evolve(const std::vector<Matrix>& states, IntegrationStats* stats = nullptr) const;

  /// Single state; asserts the density-matrix invariants on the result.
  DensityMatrix evolve(const DensityMatrix& rho0, IntegrationStats* stats = nullptr) const;

  /// Schroedinger evolution of state columns; requires no collapse operators.
  Matrix evolve_pure(const Matrix& columns, IntegrationStats* stats = nullptr) const;

  /// Records populations (and the listed coherences) after every
  /// `every`-th accepted step and at segment ends.
  Trajectory trajectory(const DensityMatrix& rho0, std::vector<std::pair<int, int>> coherences = {},
                        int every = 1) const;

  ProcessMap process(const std::vector<int>& subspace, IntegrationStats* stats = nullptr) const;

  /// d^2 x d^2 superoperator acting on column-major vec(rho).
  Matrix superoperator(IntegrationStats* stats = nullptr) const;

  bool has_dissipation() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Integrates the master equation for one initial state.
DensityMatrix integrate(const SimulationModel& model, const GateSchedule& schedule,
                        const DensityMatrix& rho0, const IntegratorSettings& settings = {},
                        IntegrationStats* stats = nullptr);

SimulationModel apply_error_mask(const SimulationModel& model, const ErrorSourceMask& mask);

/// Conjugation rho -> U rho U^dagger.
Matrix conjugate(const Matrix& rho, const Matrix& u);

}  // namespace reigate
