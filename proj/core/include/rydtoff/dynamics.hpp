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

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rydtoff/basis.hpp"
#include "rydtoff/geometry.hpp"
#include "rydtoff/physparams.hpp"
#include "rydtoff/propagator.hpp"
#include "rydtoff/rng.hpp"

namespace rydtoff {

// kTotalRate: each Rydberg level leaves at Gamma in total (Gamma/2 into |0>
// and into |1>). kBranchSum: each branch carries Gamma, total 2 Gamma.
enum class DecayConvention { kTotalRate, kBranchSum };

enum class Estimator {
  kStratified,  // exact no-jump branch plus trajectories conditioned on a jump
  kPlain,       // standard unconditioned trajectories
};

struct CtLeakageChannel {
  double delta = 0.0;             // pair-state defect, rad/us
  std::vector<double> coupling;   // per control, rad/us
};

struct CcLeakageChannel {
  double delta = 0.0;
  std::vector<double> coupling;   // packed control pairs, see PairInteractions
};

struct LeakageTerms {
  std::vector<CtLeakageChannel> ct;   // at most kMaxLeakChannels
  std::optional<CcLeakageChannel> cc;
  bool keep_vdw = false;              // keep C6/d^6 alongside the cc channel

  bool empty() const { return ct.empty() && !cc; }
};

struct GateModel {
  int n = 0;
  std::vector<double> u_ct;
  std::vector<double> u_cc;  // packed control pairs
  double gamma_s = 0.0;      // total leave rate of |s>
  double gamma_p = 0.0;      // total leave rate of |p>
  LeakageTerms leakage;

  static GateModel from_geometry(const Geometry& g, const SpeciesParams& sp,
                                 DecayConvention conv = DecayConvention::kTotalRate);
};

enum class Transition { kNone, kControl0P, kTarget1S, kTarget0S };

struct Stage {
  Transition transition = Transition::kNone;
  double duration = 0.0;
  cplx amplitude = 0.0;
};

struct PulseSchedule {
  std::vector<Stage> stages;

  double duration() const;
  // Controls 0->p, target 1<->s, 0<->s, 1<->s, controls back with -Omega_c.
  static PulseSchedule standard(const DriveParams& drive);
};

// Static per-shot drive imperfections.
struct DriveNoise {
  std::vector<cplx> stage_factor;  // multiplies each stage amplitude; empty = 1
  std::vector<double> detuning;    // per atom, rad/us, applied as exp(i Delta t) on its drive
};

struct StateVector {
  std::vector<BasisState> basis;
  CVector amp;

  static StateVector basis_state(BasisState s);
  double norm() const { return amp.norm(); }
  cplx amplitude(BasisState s) const;
  double population(BasisState s) const { return std::norm(amplitude(s)); }
  template <class Pred>
  double population_where(Pred pred) const {
    double p = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (pred(basis[i])) p += std::norm(amp[i]);
    }
    return p;
  }
};

Subspace full_subspace(const LevelScheme& scheme);

// Closure of the seed states under every coupling of the model and every
// stage of the schedule.
Subspace reachable_subspace(const GateModel& m, const PulseSchedule& sched,
                            const std::vector<BasisState>& seeds);

// Exchange, vdW and leakage terms.
SparseOp build_interaction_hamiltonian(const GateModel& m, const Subspace& sub);
// (Omega/2)|r><g| + h.c. for the stage's transition only. `omega` holds the
// per-atom complex Rabi frequency; empty means the stage amplitude for all.
SparseOp build_stage_hamiltonian(const Stage& stage, int n_controls, const Subspace& sub,
                                 const std::vector<cplx>& omega = {});
// -(i/2) sum_k gamma_k P_k.
SparseOp build_decay_operator(const GateModel& m, const Subspace& sub);
SparseOp effective_hamiltonian(const SparseOp& stage, const SparseOp& interaction,
                               const SparseOp& decay);

struct TrajectoryConfig {
  double dt = 0.0;  // 0: (2pi/Omega_c)/200
  int n_traj = 500;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // extra seed path component, e.g. a noise sample
  Estimator estimator = Estimator::kStratified;
  PropagatorKind propagator = PropagatorKind::kAuto;
  int workers = 0;

  void validate() const;
};

struct TrajectoryOutcome {
  StateVector state;  // normalized
  int jumps = 0;
};

struct InputResult {
  std::size_t input = 0;
  double fidelity = 0.0;
  double std_error = 0.0;
  double no_jump_weight = 0.0;    // probability of a jump-free gate
  double no_jump_fidelity = 0.0;
  double mean_jumps = 0.0;        // per sampled trajectory
  int sampled = 0;
};

struct FidelityResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<InputResult> inputs;
};

class GateSimulator {
 public:
  GateSimulator(GateModel model, PulseSchedule schedule, DriveNoise noise = {});

  const GateModel& model() const { return model_; }
  const PulseSchedule& schedule() const { return schedule_; }
  const LevelScheme& scheme() const { return scheme_; }

  double default_dt() const;
  // Throws StepTooLarge if dt times the largest possible jump rate exceeds 0.1.
  double resolution(const TrajectoryConfig& cfg) const;

  // Per-atom complex Rabi frequencies of stage s including noise.
  std::vector<cplx> stage_omega(std::size_t s) const;

  // Jump-free evolution through the first `stages` stages (all if < 0); the
  // result is not renormalized, so its squared norm is the no-jump weight.
  StateVector evolve_no_jump(const StateVector& psi0, int stages = -1,
                             PropagatorKind kind = PropagatorKind::kAuto) const;

  TrajectoryOutcome evolve_trajectory(const StateVector& psi0, const TrajectoryConfig& cfg,
                                      Rng& rng) const;

  InputResult simulate_input(std::size_t input, const TrajectoryConfig& cfg) const;

  // Average of |<ideal|out>|^2 over the listed inputs (all if empty).
  FidelityResult average_fidelity(const TrajectoryConfig& cfg,
                                  const std::vector<std::size_t>& inputs = {}) const;

 private:
  friend class TrajectoryEngine;

  GateModel model_;
  PulseSchedule schedule_;
  DriveNoise noise_;
  LevelScheme scheme_;
  std::vector<double> stage_start_;
};

double decay_error_analytic(int n, const DriveParams& drive, const SpeciesParams& sp);

}  // namespace rydtoff
