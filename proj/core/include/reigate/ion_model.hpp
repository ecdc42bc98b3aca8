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

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reigate/common.hpp"

namespace reigate {

/// One hyperfine level: label plus frequency offset (MHz) within its manifold.
struct Level {
  std::string label;
  double offset_mhz = 0.0;
};

/// Hyperfine level diagram of one ion species/site.
///
/// Ground and excited offsets are energies in MHz; the optical frequency of
/// |g_i> -> |e_j> relative to the optical carrier is
/// `excited[j].offset_mhz - ground[i].offset_mhz`. Doubly degenerate
/// (+/-m) pairs are treated as one level.
struct LevelScheme {
  std::string name;
  std::vector<Level> ground;
  std::vector<Level> excited;
  std::string optical_carrier = "nu0";
  /// Relative oscillator strengths, indexed [ground][excited].
  std::vector<std::vector<double>> oscillator_strength;
  double t1_optical_s = 0.0;
  double t2_optical_s = 0.0;
  /// nullopt means the ground lifetimes are infinite.
  std::optional<double> ground_lifetime_s;

  /// Checks every invariant; throws ValidationError naming the field.
  void validate() const;

  int ground_index(std::string_view label) const;
  int excited_index(std::string_view label) const;

  /// Optical frequency of |g> -> |e> relative to the carrier (MHz).
  double transition_mhz(int g, int e) const {
    return excited[e].offset_mhz - ground[g].offset_mhz;
  }
  double strength(int g, int e) const { return oscillator_strength[g][e]; }

  int num_ground() const { return static_cast<int>(ground.size()); }
  int num_excited() const { return static_cast<int>(excited.size()); }
  /// Levels per ion in the simulation basis (ground first, then excited).
  int num_levels() const { return num_ground() + num_excited(); }

  /// Energy (MHz) of simulation-basis level `k`.
  double level_energy_mhz(int k) const;
};

/// Which levels play the qubit roles. Stored as labels; resolved against a
/// LevelScheme with `resolve`.
struct QubitAssignment {
  std::string q0 = "1/2g";
  std::string q1 = "3/2g";
  std::string e = "5/2e";
  std::string aux = "5/2g";
};

/// Qubit roles as simulation-basis indices (ground levels first, excited after).
struct QubitLevels {
  int q0 = 0;
  int q1 = 0;
  int e = 0;  // basis index, i.e. num_ground + excited index
  int aux = 0;
  int q0_ground = 0;  // ground-manifold indices
  int q1_ground = 0;
  int aux_ground = 0;
  int e_excited = 0;  // excited-manifold index
};

QubitLevels resolve(const LevelScheme& scheme, const QubitAssignment& qubit);

/// Dipole-dipole optical shift between two ions.
struct DipoleCoupling {
  double delta_nu_mhz = 0.0;
  /// k in delta_nu = k / r^3, MHz nm^3. Unset until the user supplies it.
  std::optional<double> distance_constant_mhz_nm3;

  /// Shift at ion separation `r_nm`. Requires the distance constant.
  double shift_at_distance(double r_nm) const;
  static DipoleCoupling from_distance(double k_mhz_nm3, double r_nm);
};

/// Error-source toggles for a SimulationModel.
struct ErrorSourceMask {
  bool decay_decoherence = true;
  bool internal_crosstalk = true;

  static ErrorSourceMask physical() { return {true, true}; }
  static ErrorSourceMask decay_only() { return {true, false}; }
  static ErrorSourceMask crosstalk_only() { return {false, true}; }
  static ErrorSourceMask ideal() { return {false, false}; }

  bool operator==(const ErrorSourceMask&) const = default;
};

/// Sparse operator entry |row><col| with a complex amplitude.
struct OperatorEntry {
  int row = 0;
  int col = 0;
  Complex value{1.0, 0.0};
};

/// Lindblad collapse operator L = sqrt(rate) * sum(entries).
struct CollapseOperator {
  std::string label;
  double rate = 0.0;  // 1/us
  std::vector<OperatorEntry> entries;
};

/// Single-ion collapse operators on the num_levels() basis: optical decay
/// with branching by normalized oscillator strength, pure dephasing of each
/// excited level, and ground relaxation only for finite ground lifetimes.
std::vector<CollapseOperator> build_collapse_ops(const LevelScheme& scheme);

/// Coherence decay rate (1/us) added by pure dephasing: 1/T2 - 1/(2 T1).
double pure_dephasing_rate(const LevelScheme& scheme);

/// One ion inside a SimulationModel.
struct IonSite {
  LevelScheme scheme;
  QubitAssignment qubit;
  QubitLevels levels;
  /// Optical offset (MHz) of this ion relative to ion A.
  double optical_offset_mhz = 0.0;
};

/// Immutable description of the simulated system: one ion (6 levels) or two
/// ions (36 levels) with a dipole coupling between their excited manifolds.
class SimulationModel {
 public:
  static SimulationModel single_ion(LevelScheme scheme, QubitAssignment qubit = {});

  const std::vector<IonSite>& ions() const { return ions_; }
  const IonSite& ion(int i) const { return ions_.at(static_cast<std::size_t>(i)); }
  int num_ions() const { return static_cast<int>(ions_.size()); }
  int dimension() const { return dimension_; }
  int levels_per_ion(int i) const { return ion(i).scheme.num_levels(); }

  double dipole_shift_mhz() const { return dipole_shift_mhz_; }
  const ErrorSourceMask& mask() const { return mask_; }

  /// Basis index of a product state given per-ion local level indices.
  int product_index(int level_a, int level_b = 0) const;

  /// Collapse operators lifted to the full space (empty if decay is masked).
  std::vector<CollapseOperator> collapse_ops() const;

  /// Diagonal of the static interaction Hamiltonian (rad/us):
  /// 2*pi*dnu on states where both ions are in the excited manifold.
  RealVector interaction_diagonal() const;

  /// Copy with a different mask.
  SimulationModel with_mask(ErrorSourceMask mask) const;
  /// Copy with ion `i` replaced by another scheme (same qubit assignment).
  SimulationModel with_scheme(int i, LevelScheme scheme) const;

 private:
  friend SimulationModel build_two_ion_model(const LevelScheme&, const QubitAssignment&,
                                             const LevelScheme&, const QubitAssignment&,
                                             const DipoleCoupling&, double);
  SimulationModel() = default;
  void finalize();

  std::vector<IonSite> ions_;
  int dimension_ = 0;
  double dipole_shift_mhz_ = 0.0;
  ErrorSourceMask mask_;
};

/// Two-ion model on the tensor-product space (A major). `detuning_mhz` is the
/// optical offset of ion B relative to ion A.
SimulationModel build_two_ion_model(const LevelScheme& scheme_a, const QubitAssignment& qubit_a,
                                    const LevelScheme& scheme_b, const QubitAssignment& qubit_b,
                                    const DipoleCoupling& coupling, double detuning_mhz);

/// Same scheme and assignment for both ions.
SimulationModel build_two_ion_model(const LevelScheme& scheme, const QubitAssignment& qubit,
                                    const DipoleCoupling& coupling, double detuning_mhz = 0.0);

/// Parsed ion config file.
struct IonConfig {
  LevelScheme scheme;
  QubitAssignment qubit;
  /// FNV-1a hash of the file contents, hex encoded.
  std::string content_hash;
};

/// Parses and validates an ion config. See docs/formats.md for the schema.
IonConfig parse_ion_config(std::string_view text);
IonConfig load_ion_config(const std::filesystem::path& path);

/// The shipped 153Eu:Y2SiO5 site 1 config, embedded at build time.
IonConfig default_ion_config();
std::string_view default_ion_config_text();

}  // namespace reigate
