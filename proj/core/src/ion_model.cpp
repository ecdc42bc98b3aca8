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

#include "reigate/ion_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "reigate/text_format.hpp"

namespace reigate {

double wrap_phase(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can land exactly on 2pi after the correction for tiny negatives.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

namespace {

int find_label(const std::vector<Level>& levels, std::string_view label) {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

void check_increasing(const std::vector<Level>& levels, const char* field) {
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i].offset_mhz > levels[i - 1].offset_mhz)) {
      throw ValidationError(std::string(field) +
                            ": level frequency offsets must be strictly increasing");
    }
  }
}

}  // namespace

void LevelScheme::validate() const {
  if (ground.size() != 3 || excited.size() != 3) {
    throw ValidationError("level count: expected 3 ground and 3 excited levels, got " +
                          std::to_string(ground.size()) + " and " +
                          std::to_string(excited.size()));
  }
  check_increasing(ground, "ground_offsets_mhz");
  check_increasing(excited, "excited_offsets_mhz");
  std::set<std::string> labels;
  for (const auto& l : ground) labels.insert(l.label);
  for (const auto& l : excited) labels.insert(l.label);
  if (labels.size() != ground.size() + excited.size()) {
    throw ValidationError("levels: labels must be unique");
  }
  if (oscillator_strength.size() != ground.size()) {
    throw ValidationError("oscillator_strengths: expected one row per ground level");
  }
  for (const auto& row : oscillator_strength) {
    if (row.size() != excited.size()) {
      throw ValidationError("oscillator_strengths: expected one column per excited level");
    }
    for (double f : row) {
      if (!(f >= 0.0 && f <= 1.0)) {
        throw ValidationError("oscillator strength range: entries must lie in [0, 1]");
      }
    }
  }
  if (!(t1_optical_s > 0.0) || !std::isfinite(t1_optical_s)) {
    throw ValidationError("t1_optical_s: must be positive and finite");
  }
  if (!(t2_optical_s > 0.0) || !std::isfinite(t2_optical_s)) {
    throw ValidationError("t2_optical_s: must be positive and finite");
  }
  if (t2_optical_s > 2.0 * t1_optical_s) {
    throw ValidationError("t2_optical_s: must not exceed 2 * t1_optical_s");
  }
  if (ground_lifetime_s && !(*ground_lifetime_s > 0.0)) {
    throw ValidationError("ground_lifetime: must be positive or \"infinite\"");
  }
}

int LevelScheme::ground_index(std::string_view label) const {
  int i = find_label(ground, label);
  if (i < 0) throw ValidationError("unknown ground level '" + std::string(label) + "'");
  return i;
}

int LevelScheme::excited_index(std::string_view label) const {
  int i = find_label(excited, label);
  if (i < 0) throw ValidationError("unknown excited level '" + std::string(label) + "'");
  return i;
}

double LevelScheme::level_energy_mhz(int k) const {
  return k < num_ground() ? ground[k].offset_mhz : excited[k - num_ground()].offset_mhz;
}

QubitLevels resolve(const LevelScheme& scheme, const QubitAssignment& qubit) {
  QubitLevels out;
  out.q0_ground = scheme.ground_index(qubit.q0);
  out.q1_ground = scheme.ground_index(qubit.q1);
  out.aux_ground = scheme.ground_index(qubit.aux);
  out.e_excited = scheme.excited_index(qubit.e);
  if (out.q0_ground == out.q1_ground || out.q0_ground == out.aux_ground ||
      out.q1_ground == out.aux_ground) {
    throw ValidationError("qubit: q0, q1 and aux must be distinct ground levels");
  }
  out.q0 = out.q0_ground;
  out.q1 = out.q1_ground;
  out.aux = out.aux_ground;
  out.e = scheme.num_ground() + out.e_excited;
  return out;
}

double DipoleCoupling::shift_at_distance(double r_nm) const {
  if (!distance_constant_mhz_nm3) {
    throw ValidationError("dipole coupling: distance constant k is not set");
  }
  if (!(r_nm > 0.0)) throw ValidationError("dipole coupling: distance must be positive");
  return *distance_constant_mhz_nm3 / (r_nm * r_nm * r_nm);
}

DipoleCoupling DipoleCoupling::from_distance(double k_mhz_nm3, double r_nm) {
  DipoleCoupling c;
  c.distance_constant_mhz_nm3 = k_mhz_nm3;
  c.delta_nu_mhz = c.shift_at_distance(r_nm);
  return c;
}

double pure_dephasing_rate(const LevelScheme& scheme) {
  const double t1 = seconds_to_us(scheme.t1_optical_s);
  const double t2 = seconds_to_us(scheme.t2_optical_s);
  const double rate = 1.0 / t2 - 1.0 / (2.0 * t1);
  if (rate < 0.0) {
    throw ValidationError("t2_optical_s: exceeds 2 * t1_optical_s (negative dephasing rate)");
  }
  return rate;
}

std::vector<CollapseOperator> build_collapse_ops(const LevelScheme& scheme) {
  std::vector<CollapseOperator> ops;
  const int ng = scheme.num_ground();
  const int ne = scheme.num_excited();
  const double gamma1 = 1.0 / seconds_to_us(scheme.t1_optical_s);

  for (int e = 0; e < ne; ++e) {
    double column = 0.0;
    for (int g = 0; g < ng; ++g) column += scheme.strength(g, e);
    if (column <= 0.0) continue;  // no radiative channel out of this level
    for (int g = 0; g < ng; ++g) {
      const double branch = scheme.strength(g, e) / column;
      if (branch <= 0.0) continue;
      ops.push_back({"decay " + scheme.excited[e].label + "->" + scheme.ground[g].label,
                     gamma1 * branch,
                     {{g, ng + e, 1.0}}});
    }
  }

  // L = sqrt(2 g) |e><e| damps every ground-excited coherence at rate g.
  const double dephasing = pure_dephasing_rate(scheme);
  if (dephasing > 0.0) {
    for (int e = 0; e < ne; ++e) {
      ops.push_back({"dephase " + scheme.excited[e].label, 2.0 * dephasing,
                     {{ng + e, ng + e, 1.0}}});
    }
  }

  if (scheme.ground_lifetime_s && ng > 1) {
    const double rate = 1.0 / (seconds_to_us(*scheme.ground_lifetime_s) * (ng - 1));
    for (int from = 0; from < ng; ++from) {
      for (int to = 0; to < ng; ++to) {
        if (from == to) continue;
        ops.push_back({"relax " + scheme.ground[from].label + "->" + scheme.ground[to].label,
                       rate,
                       {{to, from, 1.0}}});
      }
    }
  }
  return ops;
}

SimulationModel SimulationModel::single_ion(LevelScheme scheme, QubitAssignment qubit) {
  scheme.validate();
  SimulationModel model;
  IonSite site;
  site.levels = resolve(scheme, qubit);
  site.scheme = std::move(scheme);
  site.qubit = std::move(qubit);
  model.ions_.push_back(std::move(site));
  model.finalize();
  return model;
}

void SimulationModel::finalize() {
  dimension_ = 1;
  for (const auto& ion : ions_) dimension_ *= ion.scheme.num_levels();
}

int SimulationModel::product_index(int level_a, int level_b) const {
  if (num_ions() == 1) return level_a;
  return level_a * levels_per_ion(1) + level_b;
}

std::vector<CollapseOperator> SimulationModel::collapse_ops() const {
  std::vector<CollapseOperator> out;
  if (!mask_.decay_decoherence) return out;
  if (num_ions() == 1) return build_collapse_ops(ions_[0].scheme);

  const int na = levels_per_ion(0);
  const int nb = levels_per_ion(1);
  for (int which = 0; which < 2; ++which) {
    for (auto& op : build_collapse_ops(ions_[which].scheme)) {
      CollapseOperator lifted;
      lifted.label = std::string(which == 0 ? "A: " : "B: ") + op.label;
      lifted.rate = op.rate;
      const int spectator = which == 0 ? nb : na;
      for (const auto& entry : op.entries) {
        for (int k = 0; k < spectator; ++k) {
          if (which == 0) {
            lifted.entries.push_back({entry.row * nb + k, entry.col * nb + k, entry.value});
          } else {
            lifted.entries.push_back({k * nb + entry.row, k * nb + entry.col, entry.value});
          }
        }
      }
      out.push_back(std::move(lifted));
    }
  }
  return out;
}

RealVector SimulationModel::interaction_diagonal() const {
  RealVector diag = RealVector::Zero(dimension_);
  if (num_ions() < 2 || dipole_shift_mhz_ == 0.0) return diag;
  const int nga = ions_[0].scheme.num_ground();
  const int ngb = ions_[1].scheme.num_ground();
  for (int a = nga; a < levels_per_ion(0); ++a) {
    for (int b = ngb; b < levels_per_ion(1); ++b) {
      diag(product_index(a, b)) = kTwoPi * dipole_shift_mhz_;
    }
  }
  return diag;
}

SimulationModel SimulationModel::with_mask(ErrorSourceMask mask) const {
  SimulationModel copy = *this;
  copy.mask_ = mask;
  return copy;
}

SimulationModel SimulationModel::with_scheme(int i, LevelScheme scheme) const {
  scheme.validate();
  SimulationModel copy = *this;
  auto& site = copy.ions_.at(static_cast<std::size_t>(i));
  site.levels = resolve(scheme, site.qubit);
  site.scheme = std::move(scheme);
  copy.finalize();
  return copy;
}

SimulationModel build_two_ion_model(const LevelScheme& scheme_a, const QubitAssignment& qubit_a,
                                    const LevelScheme& scheme_b, const QubitAssignment& qubit_b,
                                    const DipoleCoupling& coupling, double detuning_mhz) {
  scheme_a.validate();
  scheme_b.validate();
  if (!std::isfinite(coupling.delta_nu_mhz)) {
    throw ValidationError("dipole coupling: delta_nu must be finite");
  }
  SimulationModel model;
  model.ions_.push_back({scheme_a, qubit_a, resolve(scheme_a, qubit_a), 0.0});
  model.ions_.push_back({scheme_b, qubit_b, resolve(scheme_b, qubit_b), detuning_mhz});
  model.dipole_shift_mhz_ = coupling.delta_nu_mhz;
  model.finalize();
  return model;
}

SimulationModel build_two_ion_model(const LevelScheme& scheme, const QubitAssignment& qubit,
                                    const DipoleCoupling& coupling, double detuning_mhz) {
  return build_two_ion_model(scheme, qubit, scheme, qubit, coupling, detuning_mhz);
}

namespace {

std::vector<Level> make_levels(const std::vector<std::string>& labels,
                               const std::vector<double>& offsets, const char* field) {
  if (labels.size() != offsets.size()) {
    throw ValidationError(std::string(field) + ": label and offset lists differ in length");
  }
  std::vector<Level> out;
  for (std::size_t i = 0; i < labels.size(); ++i) out.push_back({labels[i], offsets[i]});
  return out;
}

}  // namespace

IonConfig parse_ion_config(std::string_view text) {
  const auto doc = IniDocument::parse(text);
  IonConfig cfg;
  auto& s = cfg.scheme;

  s.ground = make_levels(doc.get_strings("levels", "ground"),
                         doc.get_numbers("levels", "ground_offsets_mhz"), "ground");
  s.excited = make_levels(doc.get_strings("levels", "excited"),
                          doc.get_numbers("levels", "excited_offsets_mhz"), "excited");
  if (s.ground.size() != 3 || s.excited.size() != 3) {
    throw ValidationError("level count: expected 3 ground and 3 excited levels, got " +
                          std::to_string(s.ground.size()) + " and " +
                          std::to_string(s.excited.size()));
  }
  if (const auto* e = doc.find("levels", "optical_carrier")) {
    s.optical_carrier = IniDocument::to_string(*e);
  }
  if (const auto* e = doc.find("levels", "name")) s.name = IniDocument::to_string(*e);

  const auto& rows = doc.section("oscillator_strengths");
  s.oscillator_strength.assign(s.ground.size(), {});
  std::vector<bool> seen(s.ground.size(), false);
  for (const auto& row : rows) {
    const int g = find_label(s.ground, row.key);
    if (g < 0) {
      throw ValidationError("oscillator_strengths: unknown ground level '" + row.key + "'");
    }
    s.oscillator_strength[static_cast<std::size_t>(g)] = IniDocument::to_numbers(row);
    seen[static_cast<std::size_t>(g)] = true;
  }
  for (std::size_t g = 0; g < seen.size(); ++g) {
    if (!seen[g]) {
      throw ValidationError("oscillator_strengths: missing row for '" + s.ground[g].label + "'");
    }
  }

  s.t1_optical_s = doc.get_number("coherence", "t1_optical_s");
  s.t2_optical_s = doc.get_number("coherence", "t2_optical_s");
  if (const auto* e = doc.find("coherence", "ground_lifetime")) {
    if (!e->value.empty() && e->value.front() == '"') {
      const auto v = IniDocument::to_string(*e);
      if (v != "infinite") {
        throw ValidationError("ground_lifetime: expected \"infinite\" or a number of seconds");
      }
    } else {
      s.ground_lifetime_s = IniDocument::to_number(*e);
    }
  }

  cfg.qubit.q0 = doc.get_string("qubit", "q0");
  cfg.qubit.q1 = doc.get_string("qubit", "q1");
  cfg.qubit.e = doc.get_string("qubit", "e");
  cfg.qubit.aux = doc.get_string("qubit", "aux");

  s.validate();
  resolve(s, cfg.qubit);
  cfg.content_hash = fnv1a_hex(text);
  return cfg;
}

IonConfig load_ion_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open ion config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ion_config(buf.str());
}

IonConfig default_ion_config() { return parse_ion_config(default_ion_config_text()); }

}  // namespace reigate
