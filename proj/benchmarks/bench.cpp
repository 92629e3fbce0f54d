// Copyright 2025 The rydtoff Authors
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

#include <cmath>

#include <benchmark/benchmark.h>

#include "rydtoff/dynamics.hpp"
#include "rydtoff/errormodels.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/optimizer.hpp"
#include "rydtoff/propagator.hpp"

namespace rydtoff {
namespace {

const SpeciesParams& sp60() {
  static const SpeciesParams sp = lookup_species(60);
  return sp;
}

Geometry reference(int n) {
  switch (n) {
    case 2:
      return geometry_from_angles(5.0, {{0.0, 0.0}, {kPi, 0.0}});
    case 4:
      return regular_tetrahedron(5.0, std::acos(std::sqrt(2.0 / 3.0)), 0.0);
    default:
      return geometry_from_angles(5.0, {{kPi / 2, kPi}, {kPi / 2, 3 * kPi / 2}, {kPi / 2, 0.0}, {kPi / 2, kPi / 2},
                                        {0.0, 0.0}, {kPi, 0.0}});
  }
}

GateSimulator simulator(int n) {
  Geometry g = reference(n);
  return GateSimulator(GateModel::from_geometry(g, sp60()),
                       PulseSchedule::standard(derive_drive(pair_interactions(g, sp60()).min_abs_u_ct())));
}

void BM_ChiMin(benchmark::State& state) {
  Geometry g = reference(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(chi_min(g, sp60()));
}
BENCHMARK(BM_ChiMin)->Arg(2)->Arg(4)->Arg(6);

void BM_OptimizeRun(benchmark::State& state) {
  OptimizerConfig cfg;
  cfg.min_iterations = 10000;
  cfg.patience = 2000;
  std::uint64_t k = 0;
  for (auto _ : state) {
    Rng rng = make_rng(1, {k++});
    benchmark::DoNotOptimize(optimize_run(static_cast<int>(state.range(0)), 5.0, sp60(), cfg, rng).chi);
  }
}
BENCHMARK(BM_OptimizeRun)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ReachableSubspace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GateSimulator sim = simulator(n);
  const BasisState in = sim.scheme().computational(sim.scheme().n_inputs() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(reachable_subspace(sim.model(), sim.schedule(), {in}).size());
}
BENCHMARK(BM_ReachableSubspace)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_NoJumpGate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GateSimulator sim = simulator(n);
  const auto psi = StateVector::basis_state(sim.scheme().computational(sim.scheme().n_inputs() - 1));
  const auto kind = static_cast<PropagatorKind>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(sim.evolve_no_jump(psi, -1, kind).norm());
}
BENCHMARK(BM_NoJumpGate)
    ->ArgsProduct({{2, 4, 6},
                   {static_cast<long>(PropagatorKind::kTaylor), static_cast<long>(PropagatorKind::kDense)}})
    ->Unit(benchmark::kMillisecond);

void BM_SimulateInput(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GateSimulator sim = simulator(n);
  TrajectoryConfig cfg{.n_traj = 100, .seed = 3};
  for (auto _ : state) benchmark::DoNotOptimize(sim.simulate_input(sim.scheme().n_inputs() - 1, cfg).fidelity);
}
BENCHMARK(BM_SimulateInput)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_ExpmApply(benchmark::State& state) {
  GateSimulator sim = simulator(4);
  Subspace sub = full_subspace(sim.scheme());
  SparseOp h = effective_hamiltonian(build_stage_hamiltonian(sim.schedule().stages[1], 4, sub),
                                     build_interaction_hamiltonian(sim.model(), sub),
                                     build_decay_operator(sim.model(), sub));
  CVector psi = CVector::Zero(sub.size());
  psi[0] = 1.0;
  const double t = sim.schedule().stages[1].duration;
  for (auto _ : state) benchmark::DoNotOptimize(expm_apply(h, psi, t).norm());
  state.counters["dim"] = static_cast<double>(sub.size());
}
BENCHMARK(BM_ExpmApply)->Unit(benchmark::kMillisecond);

void BM_LeakageCc(benchmark::State& state) {
  DriveParams d = leakage_drive(5.0);
  for (auto _ : state) benchmark::DoNotOptimize(leakage_cc_error(1, 5.0, d));
}
BENCHMARK(BM_LeakageCc)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace rydtoff

BENCHMARK_MAIN();
