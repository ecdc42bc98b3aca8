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
#include <string>

#include "reigate/ion_model.hpp"

using namespace reigate;

namespace {

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("shipped config: qubit lines at 0 and 90 MHz") {
  const IonConfig cfg = default_ion_config();
  const QubitLevels q = resolve(cfg.scheme, cfg.qubit);
  CHECK(cfg.scheme.num_levels() == 6);
  CHECK(cfg.scheme.transition_mhz(q.q0_ground, q.e_excited) == doctest::Approx(0.0));
  CHECK(cfg.scheme.transition_mhz(q.q1_ground, q.e_excited) == doctest::Approx(90.0));
  CHECK(cfg.scheme.transition_mhz(q.aux_ground, q.e_excited) == doctest::Approx(209.2));
  CHECK(q.e == cfg.scheme.num_ground() + q.e_excited);
  CHECK(cfg.content_hash.size() == 16);
}

TEST_CASE("collapse operators: each excited level decays at 1/T1 with normalized branching") {
  const LevelScheme s = default_ion_config().scheme;
  const double gamma = 1.0 / seconds_to_us(s.t1_optical_s);
  const auto ops = build_collapse_ops(s);
  for (int e = 0; e < s.num_excited(); ++e) {
    const int col = s.num_ground() + e;
    double column_sum = 0.0;
    for (int g = 0; g < s.num_ground(); ++g) column_sum += s.strength(g, e);
    double total = 0.0;
    for (int g = 0; g < s.num_ground(); ++g) {
      double rate_to_g = 0.0;
      for (const auto& op : ops) {
        for (const auto& en : op.entries) {
          if (en.col == col && en.row == g) rate_to_g += op.rate * std::norm(en.value);
        }
      }
      CHECK(rate_to_g == doctest::Approx(gamma * s.strength(g, e) / column_sum).epsilon(1e-12));
      total += rate_to_g;
    }
    CHECK(total == doctest::Approx(gamma).epsilon(1e-12));
  }
  const double t1 = seconds_to_us(s.t1_optical_s), t2 = seconds_to_us(s.t2_optical_s);
  CHECK(pure_dephasing_rate(s) == doctest::Approx(1.0 / t2 - 0.5 / t1).epsilon(1e-12));
}

TEST_CASE("config validation names the offending field") {
  const std::string good(default_ion_config_text());
  CHECK_NOTHROW(parse_ion_config(good));
  CHECK(parse_ion_config(good).content_hash == default_ion_config().content_hash);

  auto fails_with = [](const std::string& text, const std::string& needle) {
    try {
      parse_ion_config(text);
    } catch (const ValidationError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with(replace(good, "1/2g = [0.02, 0.23, 0.75]", "1/2g = [0.02, 0.23, 1.75]"), "oscillator strength"));
  CHECK(fails_with(replace(good, "t2_optical_s = 2.6e-3", "t2_optical_s = 4.0e-3"), "t2_optical_s"));
  CHECK(fails_with(replace(good, "t1_optical_s = 1.9e-3", "t1_optical_s = -1"), "t1_optical_s"));
  CHECK(fails_with(replace(good, "aux = \"5/2g\"", "aux = \"1/2g\""), "qubit"));
  CHECK(fails_with(replace(good, "[-209.2, -90.0, 0.0]", "[-209.2, 0.0]"), "ground"));
  CHECK_THROWS_AS(load_ion_config("/nonexistent/ion.ini"), ValidationError);
}

TEST_CASE("two-ion model: dimension, product index and interaction diagonal") {
  const IonConfig cfg = default_ion_config();
  const double dnu = 3.0;
  const auto m = build_two_ion_model(cfg.scheme, cfg.qubit, DipoleCoupling{dnu, {}});
  CHECK(m.num_ions() == 2);
  CHECK(m.dimension() == 36);
  CHECK(m.product_index(2, 4) == 2 * 6 + 4);
  const RealVector d = m.interaction_diagonal();
  int shifted = 0;
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      const double expect = (a >= 3 && b >= 3) ? kTwoPi * dnu : 0.0;
      CHECK(d(m.product_index(a, b)) == doctest::Approx(expect));
      shifted += expect != 0.0;
    }
  }
  CHECK(shifted == 9);
  CHECK(m.with_mask(ErrorSourceMask::ideal()).collapse_ops().empty());
}

TEST_CASE("dipole coupling from distance follows 1/r^3") {
  const auto c = DipoleCoupling::from_distance(1000.0, 10.0);
  CHECK(c.delta_nu_mhz == doctest::Approx(1.0));
  CHECK(c.shift_at_distance(5.0) == doctest::Approx(8.0));
  const DipoleCoupling no_k{1.0, {}};
  CHECK_THROWS_AS(no_k.shift_at_distance(1.0), ValidationError);
}
