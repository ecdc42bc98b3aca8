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
#include <benchmark/benchmark.h>

#include "reigate/gate_schemes.hpp"
#include "reigate/metrics.hpp"
#include "reigate/spectral.hpp"

using namespace reigate;

namespace {

const IonConfig& cfg() {
  static const IonConfig c = default_ion_config();
  return c;
}

void BM_CutGaussianEval(benchmark::State& state) {
  const auto p = default_sq_pulse();
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_cut_gaussian(p, t));
    t = t > 1.6 ? 0.0 : t + 1e-3;
  }
}
BENCHMARK(BM_CutGaussianEval);

void BM_SechscanEval(benchmark::State& state) {
  const auto p = default_sechscan();
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_sechscan(p, t));
    t = t > 1.6 ? 0.0 : t + 1e-3;
  }
}
BENCHMARK(BM_SechscanEval);

// One SQ gate on the 6-level ion; the argument is -log10 of the tolerance.
void BM_SqGateDensity(benchmark::State& state) {
  const auto model = SimulationModel::single_ion(cfg().scheme, cfg().qubit);
  const auto tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  const Propagator prop(model, sq_schedule({0.0, kPi, default_sq_pulse()}, cfg().qubit),
                        IntegratorSettings::with_tolerance(tol));
  const auto rho0 = DensityMatrix::basis(6, model.ion(0).levels.q0);
  for (auto _ : state) benchmark::DoNotOptimize(prop.evolve(rho0));
}
BENCHMARK(BM_SqGateDensity)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SqGatePure(benchmark::State& state) {
  const auto model = SimulationModel::single_ion(cfg().scheme, cfg().qubit).with_mask(ErrorSourceMask::crosstalk_only());
  const Propagator prop(model, sq_schedule({0.0, kPi, default_sq_pulse()}, cfg().qubit));
  Matrix cols = Matrix::Identity(6, 6);
  for (auto _ : state) benchmark::DoNotOptimize(prop.evolve_pure(cols));
}
BENCHMARK(BM_SqGatePure)->Unit(benchmark::kMillisecond);

void BM_SqAverage36(benchmark::State& state) {
  const auto model = SimulationModel::single_ion(cfg().scheme, cfg().qubit);
  for (auto _ : state) benchmark::DoNotOptimize(average_sq_error(model, default_sq_pulse()));
}
BENCHMARK(BM_SqAverage36)->Unit(benchmark::kMillisecond);

void BM_BlockadeSingleRun(benchmark::State& state) {
  const auto model = build_two_ion_model(cfg().scheme, cfg().qubit, DipoleCoupling{200.0, {}});
  const auto gate = blockade_gate(BlockadeSpec{}, cfg().qubit);
  const Propagator prop(model, gate.schedule);
  const auto rho0 = DensityMatrix::basis(36, model.product_index(model.ion(0).levels.q0, model.ion(1).levels.q0));
  for (auto _ : state) benchmark::DoNotOptimize(prop.evolve(rho0));
}
BENCHMARK(BM_BlockadeSingleRun)->Unit(benchmark::kMillisecond);

void BM_SpectatorPenalty(benchmark::State& state) {
  const auto sched = sq_schedule({0.0, kPi, default_sq_pulse()}, cfg().qubit);
  for (auto _ : state) benchmark::DoNotOptimize(spectator_penalty(sched, SpectatorPenaltySpec{}, cfg().scheme));
}
BENCHMARK(BM_SpectatorPenalty)->Unit(benchmark::kMillisecond);

void BM_TransmissionWindows(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_transmission_windows(cfg().scheme, cfg().qubit));
}
BENCHMARK(BM_TransmissionWindows)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
