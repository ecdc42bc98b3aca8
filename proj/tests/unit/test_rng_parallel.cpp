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

#include <cstdlib>
#include <stdexcept>

#include "reigate/parallel.hpp"
#include "reigate/rng.hpp"

using namespace reigate;

TEST_CASE("counter RNG streams are reproducible and independent") {
  CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool differ_stream = false, differ_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differ_stream |= x != c.next();
    differ_seed |= x != d.next();
  }
  CHECK(differ_stream);
  CHECK(differ_seed);
  CHECK(a.counter() == 100);
}

TEST_CASE("uniform draws fill [0, 1) with the right moments") {
  CounterRng r(1, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.01));
  CHECK(lo < 1e-4);
  CHECK(hi > 1 - 1e-4);
  CHECK(r.uniform(-2.0, -1.0) < -1.0);
}

TEST_CASE("parallel_map keeps input order for any worker count") {
  for (int w : {1, 2, 7}) {
    const auto out = parallel_map(50, [](std::size_t i) { return static_cast<int>(i * i); }, w);
    for (std::size_t i = 0; i < 50; ++i) CHECK(out[i] == static_cast<int>(i * i));
  }
}

TEST_CASE("parallel_map rethrows the lowest failing index") {
  auto f = [](std::size_t i) -> int {
    if (i == 5 || i == 9) throw std::runtime_error("fail " + std::to_string(i));
    return 0;
  };
  for (int w : {1, 4}) {
    try {
      parallel_map(20, f, w);
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "fail 5");
    }
  }
}

TEST_CASE("worker default follows REIGATE_WORKERS") {
  setenv("REIGATE_WORKERS", "3", 1);
  CHECK(default_worker_count() == 3);
  setenv("REIGATE_WORKERS", "junk", 1);
  CHECK(default_worker_count() >= 1);
  unsetenv("REIGATE_WORKERS");
  CHECK(default_worker_count() >= 1);
}
