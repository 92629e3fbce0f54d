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

#include "rydtoff/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_set>

#include "rydtoff/error.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/parallel.hpp"

namespace rydtoff {

namespace {

struct DriveSpec {
  Level ground;
  Level rydberg;
  int first_atom;
  int end_atom;
};

std::optional<DriveSpec> drive_spec(Transition t, int n) {
  switch (t) {
    case Transition::kControl0P: return DriveSpec{Level::kZero, Level::kP, 0, n};
    case Transition::kTarget1S: return DriveSpec{Level::kOne, Level::kS, n, n + 1};
    case Transition::kTarget0S: return DriveSpec{Level::kZero, Level::kS, n, n + 1};
    case Transition::kNone: break;
  }
  return std::nullopt;
}

template <class F>
void for_each_drive(BasisState s, const DriveSpec& d, const std::vector<cplx>& omega, F&& f) {
  for (int a = d.first_atom; a < d.end_atom; ++a) {
    const cplx w = omega[a];
    if (w == cplx(0.0)) continue;
    Level l = level_of(s, a);
    if (l == d.ground) {
      f(with_level(s, a, d.rydberg), 0.5 * w);
    } else if (l == d.rydberg) {
      f(with_level(s, a, d.ground), 0.5 * std::conj(w));
    }
  }
}

int leak_channel(Level l) {
  int c = static_cast<int>(l);
  return (c >= 4 && c < 4 + 2 * kMaxLeakChannels) ? (c - 4) / 2 : -1;
}

template <class F>
void for_each_interaction(BasisState s, const GateModel& m, F&& f) {
  const int n = m.n;
  const int t = n;
  const Level lt = level_of(s, t);
  if (lt == Level::kP || lt == Level::kS) {
    for (int j = 0; j < n; ++j) {
      const Level lj = level_of(s, j);
      if (lj == Level::kP && lt == Level::kS) {
        if (m.u_ct[j] != 0.0) f(with_level(with_level(s, j, Level::kS), t, Level::kP), cplx(m.u_ct[j]));
        for (std::size_t k = 0; k < m.leakage.ct.size(); ++k) {
          double b = m.leakage.ct[k].coupling[j];
          int kk = static_cast<int>(k);
          if (b != 0.0) f(with_level(with_level(s, j, leak_a(kk)), t, leak_b(kk)), cplx(b));
        }
      } else if (lj == Level::kS && lt == Level::kP) {
        if (m.u_ct[j] != 0.0) f(with_level(with_level(s, j, Level::kP), t, Level::kS), cplx(m.u_ct[j]));
        for (std::size_t k = 0; k < m.leakage.ct.size(); ++k) {
          double b = m.leakage.ct[k].coupling[j];
          int kk = static_cast<int>(k);
          if (b != 0.0) f(with_level(with_level(s, j, leak_b(kk)), t, leak_a(kk)), cplx(b));
        }
      }
    }
  } else if (int k = leak_channel(lt); k >= 0) {
    // Target carries one half of a control-target leakage pair.
    const bool target_is_b = lt == leak_b(k);
    const Level partner = target_is_b ? leak_a(k) : leak_b(k);
    for (int j = 0; j < n; ++j) {
      if (level_of(s, j) != partner) continue;
      double b = m.leakage.ct[k].coupling[j];
      if (target_is_b) {
        f(with_level(with_level(s, j, Level::kP), t, Level::kS), cplx(b));
      } else {
        f(with_level(with_level(s, j, Level::kS), t, Level::kP), cplx(b));
      }
    }
  }
  if (m.leakage.cc) {
    const auto& cc = *m.leakage.cc;
    int first = -1, second = -1;
    for (int j = 0; j < n; ++j) {
      Level l = level_of(s, j);
      if (l == Level::kPairFirst) first = j;
      if (l == Level::kPairSecond) second = j;
    }
    if (first >= 0 && second >= 0) {
      double b = cc.coupling[PairInteractions::pair_index(first, second, n)];
      f(with_level(with_level(s, first, Level::kP), second, Level::kP), cplx(b));
    } else {
      // At most one control-control pair is excited at a time.
      for (int j = 0; j < n; ++j) {
        if (level_of(s, j) != Level::kP) continue;
        for (int k = j + 1; k < n; ++k) {
          if (level_of(s, k) != Level::kP) continue;
          double b = cc.coupling[PairInteractions::pair_index(j, k, n)];
          if (b != 0.0) f(with_level(with_level(s, j, Level::kPairFirst), k, Level::kPairSecond), cplx(b));
        }
      }
    }
  }
}

double interaction_diagonal(BasisState s, const GateModel& m) {
  const int n = m.n;
  double e = 0.0;
  if (!m.leakage.cc || m.leakage.keep_vdw) {
    for (int j = 0; j < n; ++j) {
      if (level_of(s, j) != Level::kP) continue;
      for (int k = j + 1; k < n; ++k) {
        if (level_of(s, k) == Level::kP) e += m.u_cc[PairInteractions::pair_index(j, k, n)];
      }
    }
  }
  if (int k = leak_channel(level_of(s, n)); k >= 0) e += m.leakage.ct[k].delta;
  if (m.leakage.cc) {
    for (int j = 0; j < n; ++j) {
      if (level_of(s, j) == Level::kPairFirst) {
        e += m.leakage.cc->delta;
        break;
      }
    }
  }
  return e;
}

double level_decay_rate(Level l, const GateModel& m) {
  if (l == Level::kP) return m.gamma_p;
  if (l == Level::kS) return m.gamma_s;
  return 0.0;
}

double total_decay_rate(BasisState s, const GateModel& m) {
  double g = 0.0;
  for (int a = 0; a <= m.n; ++a) g += level_decay_rate(level_of(s, a), m);
  return g;
}

SparseOp from_triplets(std::size_t d, std::vector<Eigen::Triplet<cplx>>& trips) {
  SparseOp h(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  h.setFromTriplets(trips.begin(), trips.end());
  h.makeCompressed();
  return h;
}

long require_index(const Subspace& sub, BasisState s) {
  long r = sub.find(s);
  if (r < 0) throw Error(ErrorCode::kInvalidArgument, "subspace is not closed under the Hamiltonian");
  return r;
}

}  // namespace

GateModel GateModel::from_geometry(const Geometry& g, const SpeciesParams& sp, DecayConvention conv) {
  g.validate();
  if (g.n() + 1 > kMaxAtoms) throw Error(ErrorCode::kInvalidArgument, "too many controls for dynamics");
  PairInteractions pi = pair_interactions(g, sp);
  GateModel m;
  m.n = g.n();
  m.u_ct = pi.u_ct;
  m.u_cc = pi.u_cc;
  const double f = conv == DecayConvention::kBranchSum ? 2.0 : 1.0;
  m.gamma_s = f * sp.gamma_s;
  m.gamma_p = f * sp.gamma_p;
  return m;
}

double PulseSchedule::duration() const {
  double t = 0.0;
  for (const auto& s : stages) t += s.duration;
  return t;
}

PulseSchedule PulseSchedule::standard(const DriveParams& d) {
  if (!(d.omega_t > 0.0 && d.omega_c > 0.0)) {
    throw Error(ErrorCode::kNonPositiveInteraction, "drive amplitudes must be positive");
  }
  PulseSchedule p;
  p.stages = {
      {Transition::kControl0P, kPi / d.omega_c, cplx(d.omega_c)},
      {Transition::kTarget1S, kPi / d.omega_t, cplx(d.omega_t)},
      {Transition::kTarget0S, kPi / d.omega_t, cplx(d.omega_t)},
      {Transition::kTarget1S, kPi / d.omega_t, cplx(d.omega_t)},
      {Transition::kControl0P, kPi / d.omega_c, cplx(-d.omega_c)},
  };
  return p;
}

StateVector StateVector::basis_state(BasisState s) {
  StateVector v;
  v.basis = {s};
  v.amp = CVector::Ones(1);
  return v;
}

cplx StateVector::amplitude(BasisState s) const {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i] == s) return amp[static_cast<Eigen::Index>(i)];
  }
  return 0.0;
}

Subspace full_subspace(const LevelScheme& scheme) {
  std::vector<BasisState> states(scheme.dimension());
  for (std::size_t i = 0; i < states.size(); ++i) states[i] = scheme.state(i);
  return Subspace(std::move(states));
}

Subspace reachable_subspace(const GateModel& m, const PulseSchedule& sched,
                            const std::vector<BasisState>& seeds) {
  std::vector<DriveSpec> drives;
  for (const auto& st : sched.stages) {
    if (auto d = drive_spec(st.transition, m.n)) drives.push_back(*d);
  }
  const std::vector<cplx> unit(m.n + 1, cplx(1.0));
  std::unordered_set<BasisState> seen(seeds.begin(), seeds.end());
  std::deque<BasisState> queue(seen.begin(), seen.end());
  auto visit = [&](BasisState to, cplx) {
    if (seen.insert(to).second) queue.push_back(to);
  };
  while (!queue.empty()) {
    BasisState s = queue.front();
    queue.pop_front();
    for (const auto& d : drives) for_each_drive(s, d, unit, visit);
    for_each_interaction(s, m, visit);
  }
  return Subspace(std::vector<BasisState>(seen.begin(), seen.end()));
}

SparseOp build_interaction_hamiltonian(const GateModel& m, const Subspace& sub) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t c = 0; c < sub.size(); ++c) {
    const BasisState s = sub[c];
    const long col = static_cast<long>(c);
    double e = interaction_diagonal(s, m);
    if (e != 0.0) trips.emplace_back(col, col, cplx(e));
    for_each_interaction(s, m, [&](BasisState to, cplx a) { trips.emplace_back(require_index(sub, to), col, a); });
  }
  return from_triplets(sub.size(), trips);
}

SparseOp build_stage_hamiltonian(const Stage& stage, int n_controls, const Subspace& sub,
                                 const std::vector<cplx>& omega) {
  std::vector<Eigen::Triplet<cplx>> trips;
  if (auto d = drive_spec(stage.transition, n_controls)) {
    std::vector<cplx> w = omega.empty() ? std::vector<cplx>(n_controls + 1, stage.amplitude) : omega;
    for (std::size_t c = 0; c < sub.size(); ++c) {
      const long col = static_cast<long>(c);
      for_each_drive(sub[c], *d, w, [&](BasisState to, cplx a) { trips.emplace_back(require_index(sub, to), col, a); });
    }
  }
  return from_triplets(sub.size(), trips);
}

SparseOp build_decay_operator(const GateModel& m, const Subspace& sub) {
  std::vector<Eigen::Triplet<cplx>> trips;
  for (std::size_t c = 0; c < sub.size(); ++c) {
    double g = total_decay_rate(sub[c], m);
    if (g != 0.0) trips.emplace_back(static_cast<long>(c), static_cast<long>(c), cplx(0.0, -0.5 * g));
  }
  return from_triplets(sub.size(), trips);
}

SparseOp effective_hamiltonian(const SparseOp& stage, const SparseOp& interaction, const SparseOp& decay) {
  SparseOp h = stage + interaction + decay;
  h.makeCompressed();
  return h;
}

void TrajectoryConfig::validate() const {
  if (dt < 0.0) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (n_traj < 0) throw Error(ErrorCode::kInvalidArgument, "n_traj must be >= 0");
}

// Work-item local state: cached subspaces with their stage propagators.
class TrajectoryEngine {
 public:
  struct Block {
    Subspace sub;
    std::vector<std::unique_ptr<StagePropagator>> prop;
    std::vector<std::vector<double>> frame;  // per stage and state; empty without detuning
  };

  struct Cursor {
    Block* block = nullptr;
    std::size_t stage = 0;
    long pos = 0;  // in units of the stage's finest dyadic step
    CVector psi;   // in the rotating frame of the current stage
  };

  struct Checkpoint {
    Cursor cursor;
    double norm2 = 1.0;
  };

  TrajectoryEngine(const GateSimulator& sim, double resolution, PropagatorKind kind)
      : sim_(sim), kind_(kind) {
    const auto& st = sim.schedule_.stages;
    for (std::size_t s = 0; s < st.size(); ++s) {
      levels_.push_back(dyadic_levels(st[s].duration, resolution));
      omega_.push_back(sim.stage_omega(s));
      spec_.push_back(drive_spec(st[s].transition, sim.model_.n));
    }
  }

  std::size_t n_stages() const { return levels_.size(); }

  Block& block_for(const std::vector<BasisState>& support) {
    Subspace sub = reachable_subspace(sim_.model_, sim_.schedule_, support);
    auto key = sub.states();
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    auto b = std::make_unique<Block>();
    b->sub = std::move(sub);
    b->prop.resize(n_stages());
    b->frame.resize(n_stages());
    const auto& det = sim_.noise_.detuning;
    for (std::size_t s = 0; s < n_stages(); ++s) {
      if (det.empty() || !spec_[s]) continue;
      auto& w = b->frame[s];
      w.assign(b->sub.size(), 0.0);
      for (std::size_t i = 0; i < b->sub.size(); ++i) {
        for (int a = spec_[s]->first_atom; a < spec_[s]->end_atom; ++a) {
          if (level_of(b->sub[i], a) == spec_[s]->ground) w[i] += det[a];
        }
      }
    }
    Block& ref = *b;
    cache_.emplace(std::move(key), std::move(b));
    return ref;
  }

  StagePropagator& propagator(Block& b, std::size_t s) {
    if (!b.prop[s]) {
      const auto& stage = sim_.schedule_.stages[s];
      SparseOp h = effective_hamiltonian(build_stage_hamiltonian(stage, sim_.model_.n, b.sub, omega_[s]),
                                         build_interaction_hamiltonian(sim_.model_, b.sub),
                                         build_decay_operator(sim_.model_, b.sub));
      if (!b.frame[s].empty()) {
        std::vector<Eigen::Triplet<cplx>> trips;
        for (std::size_t i = 0; i < b.sub.size(); ++i) {
          if (b.frame[s][i] != 0.0) trips.emplace_back(static_cast<long>(i), static_cast<long>(i), cplx(-b.frame[s][i]));
        }
        h = h + from_triplets(b.sub.size(), trips);
      }
      b.prop[s] = make_propagator(h, stage.duration, levels_[s], kind_);
    }
    return *b.prop[s];
  }

  Cursor start(const StateVector& psi0) {
    std::vector<BasisState> support;
    for (std::size_t i = 0; i < psi0.basis.size(); ++i) {
      if (psi0.amp[static_cast<Eigen::Index>(i)] != cplx(0.0)) support.push_back(psi0.basis[i]);
    }
    Cursor c;
    c.block = &block_for(support);
    c.psi = CVector::Zero(static_cast<Eigen::Index>(c.block->sub.size()));
    for (std::size_t i = 0; i < psi0.basis.size(); ++i) {
      long k = c.block->sub.find(psi0.basis[i]);
      if (k >= 0) c.psi[k] += psi0.amp[static_cast<Eigen::Index>(i)];
    }
    return c;
  }

  // Evolves until the squared norm drops to r or below (returns true, cursor
  // at the first grid point past the crossing) or the stage limit is reached.
  bool run(Cursor& c, double r, std::vector<Checkpoint>* record, std::size_t stage_limit) {
    while (c.stage < stage_limit) {
      const int k = levels_[c.stage];
      const long end = 1L << k;
      StagePropagator& prop = propagator(*c.block, c.stage);
      CVector trial;
      while (c.pos < end) {
        int level = c.pos == 0 ? 0 : k - std::countr_zero(static_cast<unsigned long>(c.pos));
        level = std::max(level, prop.coarsest());
        for (;;) {
          trial = c.psi;
          prop.advance(trial, level);
          if (r > 0.0 && trial.squaredNorm() <= r) {
            if (level == k) {
              c.psi.swap(trial);
              c.pos += 1;
              return true;
            }
            ++level;
            continue;
          }
          c.psi.swap(trial);
          c.pos += 1L << (k - level);
          break;
        }
        if (record && c.pos < end) record->push_back({c, c.psi.squaredNorm()});
      }
      to_lab(c, sim_.schedule_.stages[c.stage].duration);
      c.stage += 1;
      c.pos = 0;
      if (record) record->push_back({c, c.psi.squaredNorm()});
    }
    return false;
  }

  void jump(Cursor& c, Rng& rng) {
    const auto& m = sim_.model_;
    Block& b = *c.block;
    const double tau = elapsed(c);
    CVector lab = c.psi;
    apply_frame(b, c.stage, lab, tau, -1.0);

    std::vector<double> weight(2 * (m.n + 1), 0.0);
    for (std::size_t i = 0; i < b.sub.size(); ++i) {
      double p = std::norm(lab[static_cast<Eigen::Index>(i)]);
      if (p == 0.0) continue;
      for (int a = 0; a <= m.n; ++a) {
        Level l = level_of(b.sub[i], a);
        if (l == Level::kP) weight[2 * a] += m.gamma_p * p;
        if (l == Level::kS) weight[2 * a + 1] += m.gamma_s * p;
      }
    }
    double total = 0.0;
    for (double w : weight) total += w;
    if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "jump without Rydberg population");
    double u = uniform01(rng) * total;
    std::size_t ch = 0;
    for (; ch + 1 < weight.size(); ++ch) {
      if (weight[ch] == 0.0) continue;
      if (u < weight[ch]) break;
      u -= weight[ch];
    }
    while (weight[ch] == 0.0) --ch;
    const int atom = static_cast<int>(ch / 2);
    const Level from = (ch % 2) ? Level::kS : Level::kP;
    const Level to = uniform01(rng) < 0.5 ? Level::kZero : Level::kOne;

    std::vector<BasisState> support;
    std::vector<cplx> amps;
    for (std::size_t i = 0; i < b.sub.size(); ++i) {
      if (level_of(b.sub[i], atom) != from) continue;
      cplx a = lab[static_cast<Eigen::Index>(i)];
      if (a == cplx(0.0)) continue;
      support.push_back(with_level(b.sub[i], atom, to));
      amps.push_back(a);
    }
    Block& nb = block_for(support);
    CVector psi = CVector::Zero(static_cast<Eigen::Index>(nb.sub.size()));
    for (std::size_t i = 0; i < support.size(); ++i) psi[nb.sub.find(support[i])] += amps[i];
    apply_frame(nb, c.stage, psi, tau, +1.0);
    psi /= psi.norm();
    c.block = &nb;
    c.psi = std::move(psi);
  }

  StateVector state(const Cursor& c) const {
    StateVector v;
    v.basis = c.block->sub.states();
    v.amp = c.psi;
    return v;
  }

  double overlap(const Cursor& c, BasisState ideal) const {
    long k = c.block->sub.find(ideal);
    double n2 = c.psi.squaredNorm();
    if (k < 0 || n2 == 0.0) return 0.0;
    return std::norm(c.psi[k]) / n2;
  }

 private:
  double elapsed(const Cursor& c) const {
    if (c.stage >= n_stages()) return 0.0;
    return std::ldexp(sim_.schedule_.stages[c.stage].duration * static_cast<double>(c.pos), -levels_[c.stage]);
  }

  // sign -1: frame -> lab, +1: lab -> frame.
  void apply_frame(const Block& b, std::size_t s, CVector& psi, double tau, double sign) const {
    if (s >= n_stages() || b.frame[s].empty()) return;
    for (std::size_t i = 0; i < b.sub.size(); ++i) {
      double w = b.frame[s][i];
      if (w != 0.0) psi[static_cast<Eigen::Index>(i)] *= std::polar(1.0, sign * w * tau);
    }
  }

  void to_lab(Cursor& c, double duration) { apply_frame(*c.block, c.stage, c.psi, duration, -1.0); }

  const GateSimulator& sim_;
  PropagatorKind kind_;
  std::vector<int> levels_;
  std::vector<std::vector<cplx>> omega_;
  std::vector<std::optional<DriveSpec>> spec_;
  std::map<std::vector<BasisState>, std::unique_ptr<Block>> cache_;
};

GateSimulator::GateSimulator(GateModel model, PulseSchedule schedule, DriveNoise noise)
    : model_(std::move(model)), schedule_(std::move(schedule)), noise_(std::move(noise)), scheme_(model_.n) {
  const int n = model_.n;
  if (static_cast<int>(model_.u_ct.size()) != n ||
      model_.u_cc.size() != static_cast<std::size_t>(n) * (n - 1) / 2) {
    throw Error(ErrorCode::kInvalidArgument, "gate model interaction sizes do not match n");
  }
  if (model_.leakage.ct.size() > static_cast<std::size_t>(kMaxLeakChannels)) {
    throw Error(ErrorCode::kInvalidArgument, "too many leakage channels");
  }
  for (const auto& ch : model_.leakage.ct) {
    if (static_cast<int>(ch.coupling.size()) != n) throw Error(ErrorCode::kInvalidArgument, "leakage coupling size");
  }
  if (model_.leakage.cc && model_.leakage.cc->coupling.size() != model_.u_cc.size()) {
    throw Error(ErrorCode::kInvalidArgument, "pair leakage coupling size");
  }
  if (!noise_.stage_factor.empty() && noise_.stage_factor.size() != schedule_.stages.size()) {
    throw Error(ErrorCode::kInvalidArgument, "stage noise factors must match the schedule");
  }
  if (!noise_.detuning.empty() && static_cast<int>(noise_.detuning.size()) != n + 1) {
    throw Error(ErrorCode::kInvalidArgument, "detunings must be given per atom");
  }
  double t = 0.0;
  for (const auto& s : schedule_.stages) {
    if (!(s.duration >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative stage duration");
    stage_start_.push_back(t);
    t += s.duration;
  }
}

std::vector<cplx> GateSimulator::stage_omega(std::size_t s) const {
  const Stage& st = schedule_.stages.at(s);
  cplx base = st.amplitude;
  if (!noise_.stage_factor.empty()) base *= noise_.stage_factor[s];
  std::vector<cplx> w(model_.n + 1, base);
  if (!noise_.detuning.empty()) {
    for (int a = 0; a <= model_.n; ++a) w[a] *= std::polar(1.0, noise_.detuning[a] * stage_start_[s]);
  }
  return w;
}

double GateSimulator::default_dt() const {
  double omega_c = 0.0, omega_any = 0.0;
  for (const auto& s : schedule_.stages) {
    if (s.transition == Transition::kControl0P) omega_c = std::max(omega_c, std::abs(s.amplitude));
    if (s.transition != Transition::kNone) omega_any = std::max(omega_any, std::abs(s.amplitude));
  }
  double w = omega_c > 0.0 ? omega_c : omega_any;
  if (w > 0.0) return kTwoPi / w / 200.0;
  double t = schedule_.duration();
  return t > 0.0 ? t / 1000.0 : 1.0;
}

double GateSimulator::resolution(const TrajectoryConfig& cfg) const {
  cfg.validate();
  double dt = cfg.dt > 0.0 ? cfg.dt : default_dt();
  double max_rate = (model_.n + 1) * std::max(model_.gamma_s, model_.gamma_p);
  if (max_rate * dt > 0.1) {
    throw Error(ErrorCode::kStepTooLarge, "jump probability per step exceeds 0.1; reduce dt");
  }
  return dt;
}

StateVector GateSimulator::evolve_no_jump(const StateVector& psi0, int stages, PropagatorKind kind) const {
  TrajectoryEngine eng(*this, default_dt(), kind);
  auto c = eng.start(psi0);
  std::size_t limit = stages < 0 ? eng.n_stages() : std::min<std::size_t>(stages, eng.n_stages());
  eng.run(c, 0.0, nullptr, limit);
  return eng.state(c);
}

TrajectoryOutcome GateSimulator::evolve_trajectory(const StateVector& psi0, const TrajectoryConfig& cfg,
                                                   Rng& rng) const {
  TrajectoryEngine eng(*this, resolution(cfg), cfg.propagator);
  auto c = eng.start(psi0);
  c.psi /= c.psi.norm();
  TrajectoryOutcome out;
  while (eng.run(c, 1.0 - uniform01(rng), nullptr, eng.n_stages())) {
    eng.jump(c, rng);
    ++out.jumps;
  }
  c.psi /= c.psi.norm();
  out.state = eng.state(c);
  return out;
}

InputResult GateSimulator::simulate_input(std::size_t input, const TrajectoryConfig& cfg) const {
  TrajectoryEngine eng(*this, resolution(cfg), cfg.propagator);
  const BasisState in = scheme_.computational(input);
  const BasisState ideal = scheme_.ideal_output(input);

  std::vector<TrajectoryEngine::Checkpoint> checkpoints;
  auto c0 = eng.start(StateVector::basis_state(in));
  checkpoints.push_back({c0, 1.0});
  auto c = c0;
  eng.run(c, 0.0, &checkpoints, eng.n_stages());

  InputResult res;
  res.input = input;
  res.no_jump_weight = c.psi.squaredNorm();
  res.no_jump_fidelity = eng.overlap(c, ideal);
  const bool decays = model_.gamma_p > 0.0 || model_.gamma_s > 0.0;
  const double p_jump = decays ? 1.0 - res.no_jump_weight : 0.0;
  const bool stratified = cfg.estimator == Estimator::kStratified;
  if (cfg.n_traj == 0 || !decays || (stratified && p_jump < 1e-15)) {
    res.fidelity = res.no_jump_fidelity;
    return res;
  }

  double sum = 0.0, sum2 = 0.0, jumps = 0.0;
  for (int k = 0; k < cfg.n_traj; ++k) {
    Rng rng = make_rng(cfg.seed, {cfg.stream, input, static_cast<std::uint64_t>(k)});
    double u = 1.0 - uniform01(rng);
    double r = stratified ? res.no_jump_weight + p_jump * u : u;
    double f = res.no_jump_fidelity;
    int nj = 0;
    if (r > res.no_jump_weight) {
      // Resume from the last checkpoint still above the threshold.
      auto it = std::upper_bound(checkpoints.begin(), checkpoints.end(), r,
                                 [](double v, const TrajectoryEngine::Checkpoint& cp) { return cp.norm2 < v; });
      std::size_t idx = it == checkpoints.begin() ? 0 : static_cast<std::size_t>(it - checkpoints.begin()) - 1;
      auto t = checkpoints[idx].cursor;
      double threshold = r;
      while (eng.run(t, threshold, nullptr, eng.n_stages())) {
        eng.jump(t, rng);
        ++nj;
        threshold = 1.0 - uniform01(rng);
      }
      f = eng.overlap(t, ideal);
    }
    sum += f;
    sum2 += f * f;
    jumps += nj;
  }
  const double nt = cfg.n_traj;
  const double mean = sum / nt;
  const double var = nt > 1 ? std::max(0.0, (sum2 - nt * mean * mean) / (nt - 1.0)) : 0.0;
  res.sampled = cfg.n_traj;
  res.mean_jumps = jumps / nt;
  if (stratified) {
    res.fidelity = res.no_jump_weight * res.no_jump_fidelity + p_jump * mean;
    res.std_error = p_jump * std::sqrt(var / nt);
  } else {
    res.fidelity = mean;
    res.std_error = std::sqrt(var / nt);
  }
  return res;
}

FidelityResult GateSimulator::average_fidelity(const TrajectoryConfig& cfg,
                                               const std::vector<std::size_t>& inputs) const {
  std::vector<std::size_t> list = inputs;
  if (list.empty()) {
    list.resize(scheme_.n_inputs());
    for (std::size_t i = 0; i < list.size(); ++i) list[i] = i;
  }
  resolution(cfg);
  FidelityResult out;
  out.inputs.resize(list.size());
  parallel_for(list.size(), cfg.workers, [&](std::size_t i) { out.inputs[i] = simulate_input(list[i], cfg); });
  double var = 0.0;
  for (const auto& r : out.inputs) {
    out.mean += r.fidelity;
    var += r.std_error * r.std_error;
  }
  const double m = static_cast<double>(list.size());
  out.mean /= m;
  out.std_error = std::sqrt(var) / m;
  return out;
}

double decay_error_analytic(int n, const DriveParams& drive, const SpeciesParams& sp) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  return std::ldexp(kPi * sp.gamma_s / drive.omega_t, -n) + n * 3.0 * kPi * sp.gamma_p / (2.0 * drive.omega_t) +
         n * kPi * sp.gamma_p / (2.0 * drive.omega_c);
}

}  // namespace rydtoff
