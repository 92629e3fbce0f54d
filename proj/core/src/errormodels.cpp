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

#include "rydtoff/errormodels.hpp"

#include <cmath>

#include "rydtoff/error.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/parallel.hpp"

namespace rydtoff {

namespace {

constexpr double kBoltzmann = 1.380649e-23;    // J/K
constexpr double kAtomicMass = 1.66053906660e-27;  // kg

LeakageChannel channel(int kappa, const char* label, double c3_ghz, double delta_ghz) {
  return {kappa, label, units::from_ghz(c3_ghz), units::from_ghz(delta_ghz)};
}

void check_kappa(int kappa) {
  if (kappa < 1 || kappa > 4) throw Error(ErrorCode::kInvalidArgument, "kappa must be in 1..4");
}

double infidelity_of(const StateVector& psi, BasisState s) {
  return 1.0 - psi.population(s);
}

// Runs `eval(sample)` for every sample and returns mean and standard error.
template <class F>
ScanPoint sample_mean(double x, int samples, int workers, F&& eval) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "samples must be >= 1");
  std::vector<double> v(samples);
  parallel_for(v.size(), workers, [&](std::size_t i) { v[i] = eval(i); });
  double mean = 0.0;
  for (double e : v) mean += e;
  mean /= samples;
  double var = 0.0;
  for (double e : v) var += (e - mean) * (e - mean);
  ScanPoint p;
  p.x = x;
  p.mean = mean;
  p.std_error = samples > 1 ? std::sqrt(var / (samples - 1.0) / samples) : 0.0;
  return p;
}

TrajectoryConfig serial(TrajectoryConfig cfg) {
  cfg.workers = 1;
  return cfg;
}

}  // namespace

const std::array<LeakageChannel, 4>& ct_leakage_channels() {
  static const std::array<LeakageChannel, 4> table{
      channel(1, "|60S1/2,1/2; 61P3/2,3/2>", -9.134, 0.8771),
      channel(2, "|59D5/2,5/2; 60P1/2,-1/2>", -9.254, 7.8032),
      channel(3, "|58D5/2,5/2; 61P3/2,-1/2>", -3.926, 8.6142),
      channel(4, "|59S1/2,1/2; 62P3/2,3/2>", -0.14, 5.3452),
  };
  return table;
}

const std::array<LeakageChannel, 4>& cc_leakage_channels() {
  static const std::array<LeakageChannel, 4> table{
      channel(1, "|60S1/2,1/2; 61S1/2,1/2>", 4.301, 0.2784),
      channel(2, "|60S1/2,1/2; 59D5/2,5/2>", 5.919, 7.0614),
      channel(3, "|58D5/2,5/2; 61S1/2,1/2>", 3.203, 7.4587),
      channel(4, "|58D5/2,5/2; 59D5/2,5/2>", 4.408, 14.8012),
  };
  return table;
}

double ct_reference_c3() { return units::from_ghz(-8.388); }

const LeakageChannel& ct_leakage_channel(int kappa) {
  check_kappa(kappa);
  return ct_leakage_channels()[kappa - 1];
}

const LeakageChannel& cc_leakage_channel(int kappa) {
  check_kappa(kappa);
  return cc_leakage_channels()[kappa - 1];
}

double leakage_coupling(const LeakageChannel& ch, double theta, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::kZeroDistance, "leakage coupling at zero distance");
  const double c = std::cos(theta);
  return ch.c3 * (1.0 - 3.0 * c * c) / (-2.0 * r * r * r);
}

DriveParams leakage_drive(double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::kZeroDistance, "radius must be positive");
  return derive_drive(std::abs(ct_reference_c3()) / (radius * radius * radius));
}

double leakage_ct_rotation_error(int kappa, double r_ct, const DriveParams& drive, double coupling_scale) {
  const LeakageChannel& ch = ct_leakage_channel(kappa);
  if (!(r_ct > 0.0)) throw Error(ErrorCode::kZeroDistance, "r_ct must be positive");
  GateModel m;
  m.n = 1;
  m.u_ct = {ct_reference_c3() / (r_ct * r_ct * r_ct)};
  m.leakage.ct.push_back({ch.delta, {coupling_scale * leakage_coupling(ch, 0.0, r_ct)}});
  PulseSchedule sched;
  sched.stages = {
      {Transition::kTarget1S, kPi / drive.omega_t, cplx(drive.omega_t)},
      {Transition::kTarget0S, kPi / drive.omega_t, cplx(drive.omega_t)},
  };
  GateSimulator sim(std::move(m), std::move(sched));
  const BasisState init = with_level(with_level(0, 0, Level::kP), 1, Level::kOne);
  return infidelity_of(sim.evolve_no_jump(StateVector::basis_state(init)), init);
}

double leakage_cc_error(int kappa, double d_cc, const DriveParams& drive, double coupling_scale) {
  const LeakageChannel& ch = cc_leakage_channel(kappa);
  if (!(d_cc > 0.0)) throw Error(ErrorCode::kZeroDistance, "d_cc must be positive");
  GateModel m;
  m.n = 2;
  m.u_ct = {0.0, 0.0};
  m.u_cc = {0.0};
  m.leakage.cc = CcLeakageChannel{ch.delta, {coupling_scale * leakage_coupling(ch, 0.0, d_cc)}};
  PulseSchedule sched;
  sched.stages = {
      {Transition::kControl0P, kPi / drive.omega_c, cplx(drive.omega_c)},
      {Transition::kNone, 3.0 * kPi / drive.omega_t, cplx(0.0)},
      {Transition::kControl0P, kPi / drive.omega_c, cplx(-drive.omega_c)},
  };
  GateSimulator sim(std::move(m), std::move(sched));
  const BasisState init = with_level(0, 2, Level::kOne);
  return infidelity_of(sim.evolve_no_jump(StateVector::basis_state(init)), init);
}

LeakageTerms gate_leakage_terms(const Geometry& g, const LeakageSelection& sel) {
  g.validate();
  if (sel.ct_kappas.size() > static_cast<std::size_t>(kMaxLeakChannels)) {
    throw Error(ErrorCode::kInvalidArgument, "too many leakage channels");
  }
  const int n = g.n();
  LeakageTerms t;
  for (int kappa : sel.ct_kappas) {
    const LeakageChannel& ch = ct_leakage_channel(kappa);
    CtLeakageChannel c{ch.delta, std::vector<double>(n)};
    for (int j = 0; j < n; ++j) {
      c.coupling[j] = leakage_coupling(ch, polarizing_angle(g.controls[j], g.target), (g.controls[j] - g.target).norm());
    }
    t.ct.push_back(std::move(c));
  }
  if (sel.cc_kappa != 0 && n > 1) {
    const LeakageChannel& ch = cc_leakage_channel(sel.cc_kappa);
    CcLeakageChannel c{ch.delta, std::vector<double>(static_cast<std::size_t>(n) * (n - 1) / 2)};
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        c.coupling[PairInteractions::pair_index(j, k, n)] =
            leakage_coupling(ch, polarizing_angle(g.controls[j], g.controls[k]), (g.controls[j] - g.controls[k]).norm());
      }
    }
    t.cc = std::move(c);
  }
  return t;
}

FidelityResult gate_fidelity_with_leakage(const Geometry& g, const SpeciesParams& sp, const DriveParams& drive,
                                          const TrajectoryConfig& cfg, const LeakageSelection& sel,
                                          DecayConvention conv) {
  GateModel m = GateModel::from_geometry(g, sp, conv);
  m.leakage = gate_leakage_terms(g, sel);
  GateSimulator sim(std::move(m), PulseSchedule::standard(drive));
  return sim.average_fidelity(cfg);
}

std::vector<ScanPoint> position_error_scan(const Geometry& g0, const SpeciesParams& sp, const DriveParams& drive,
                                           const PositionScanConfig& cfg, DecayConvention conv) {
  if (cfg.fixed_sigma < 0.0) throw Error(ErrorCode::kInvalidArgument, "fixed_sigma must be >= 0");
  const PulseSchedule sched = PulseSchedule::standard(drive);
  const TrajectoryConfig traj = serial(cfg.trajectory);
  auto infidelity = [&](const Geometry& g) {
    GateSimulator sim(GateModel::from_geometry(g, sp, conv), sched);
    return 1.0 - sim.average_fidelity(traj).mean;
  };
  const double baseline = infidelity(g0);
  std::vector<ScanPoint> out;
  for (std::size_t i = 0; i < cfg.sigmas.size(); ++i) {
    const double s = cfg.sigmas[i];
    if (s < 0.0) throw Error(ErrorCode::kInvalidArgument, "sigma must be >= 0");
    PositionNoise noise{cfg.fixed_sigma, cfg.fixed_sigma, cfg.fixed_sigma};
    (cfg.axis == Axis::kX ? noise.sigma_x : cfg.axis == Axis::kY ? noise.sigma_y : noise.sigma_z) = s;
    out.push_back(sample_mean(s, cfg.samples, cfg.workers, [&](std::size_t k) {
      Rng rng = make_rng(cfg.seed, {0x706f73ULL, i, k});
      return infidelity(sample_displaced(g0, noise, rng)) - baseline;
    }));
  }
  return out;
}

void TechnicalNoise::validate() const {
  if (!(delta_omega >= 0.0 && sigma_phi >= 0.0 && temperature_uk >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise parameters must be >= 0");
  }
}

double thermal_velocity(double temperature_uk) {
  if (temperature_uk < 0.0) throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  return std::sqrt(kBoltzmann * temperature_uk * 1e-6 / (kRb87MassU * kAtomicMass));
}

DopplerWidths doppler_widths(double temperature_uk) {
  const double v = thermal_velocity(temperature_uk);
  return {kTargetWavenumber * v * 1e-6, kControlWavenumber * v * 1e-6};
}

DriveNoise sample_drive_noise(const TechnicalNoise& noise, const PulseSchedule& sched, int n_controls, Rng& rng) {
  noise.validate();
  DriveNoise d;
  auto draw = [&] {
    double a = noise.delta_omega > 0.0 ? uniform(rng, -noise.delta_omega, noise.delta_omega) : 0.0;
    double phi = noise.sigma_phi > 0.0 ? noise.sigma_phi * gaussian(rng) : 0.0;
    return std::polar(1.0 + a, phi);
  };
  if (noise.delta_omega > 0.0 || noise.sigma_phi > 0.0) {
    d.stage_factor.resize(sched.stages.size(), cplx(1.0));
    if (noise.sharing == NoiseSharing::kPerLaser) {
      const cplx control = draw();
      const cplx target = draw();
      for (std::size_t s = 0; s < sched.stages.size(); ++s) {
        d.stage_factor[s] = sched.stages[s].transition == Transition::kControl0P ? control : target;
      }
    } else {
      for (auto& f : d.stage_factor) f = draw();
    }
  }
  if (noise.temperature_uk > 0.0) {
    const DopplerWidths w = doppler_widths(noise.temperature_uk);
    d.detuning.resize(n_controls + 1);
    for (int a = 0; a < n_controls; ++a) d.detuning[a] = w.control * gaussian(rng);
    d.detuning[n_controls] = w.target * gaussian(rng);
  }
  return d;
}

ScanPoint technical_noise_point(const GateModel& model, const PulseSchedule& sched, const TechnicalNoise& noise,
                                const NoiseScanConfig& cfg) {
  noise.validate();
  const TrajectoryConfig traj = serial(cfg.trajectory);
  return sample_mean(0.0, cfg.samples, cfg.workers, [&](std::size_t k) {
    Rng rng = make_rng(cfg.seed, {0x6e6f6973ULL, k});
    GateSimulator sim(model, sched, sample_drive_noise(noise, sched, model.n, rng));
    return 1.0 - sim.average_fidelity(traj).mean;
  });
}

std::vector<ScanPoint> amplitude_noise_scan(const GateModel& model, const PulseSchedule& sched,
                                            const std::vector<double>& delta_omegas, const NoiseScanConfig& cfg,
                                            NoiseSharing sharing) {
  std::vector<ScanPoint> out;
  for (double x : delta_omegas) {
    TechnicalNoise n{.delta_omega = x, .sharing = sharing};
    ScanPoint p = technical_noise_point(model, sched, n, cfg);
    p.x = x;
    out.push_back(p);
  }
  return out;
}

std::vector<ScanPoint> phase_noise_scan(const GateModel& model, const PulseSchedule& sched,
                                        const std::vector<double>& sigmas, const NoiseScanConfig& cfg,
                                        NoiseSharing sharing) {
  std::vector<ScanPoint> out;
  for (double x : sigmas) {
    TechnicalNoise n{.sigma_phi = x, .sharing = sharing};
    ScanPoint p = technical_noise_point(model, sched, n, cfg);
    p.x = x;
    out.push_back(p);
  }
  return out;
}

std::vector<ScanPoint> doppler_scan(const GateModel& model, const PulseSchedule& sched,
                                    const std::vector<double>& temperatures_uk, const NoiseScanConfig& cfg) {
  std::vector<ScanPoint> out;
  for (double x : temperatures_uk) {
    TechnicalNoise n{.temperature_uk = x};
    ScanPoint p = technical_noise_point(model, sched, n, cfg);
    p.x = x;
    out.push_back(p);
  }
  return out;
}

}  // namespace rydtoff
