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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rydtoff/dynamics.hpp"
#include "rydtoff/geometry.hpp"
#include "rydtoff/physparams.hpp"

namespace rydtoff {

// A non-resonant pair state reached by dipole-dipole coupling. `c3` is the
// coupling coefficient along the quantization axis (rad/us um^3) and `delta`
// the pair-state defect (rad/us).
struct LeakageChannel {
  int kappa = 0;
  std::string pair_label;
  double c3 = 0.0;
  double delta = 0.0;
};

// Channels leaving the control-target pair |p s>, kappa = 1..4.
const std::array<LeakageChannel, 4>& ct_leakage_channels();
// Channels leaving the control-control pair |p p>, kappa = 1..4.
const std::array<LeakageChannel, 4>& cc_leakage_channels();
// Resonant |p s> <-> |s p> exchange coefficient of the same table.
double ct_reference_c3();

const LeakageChannel& ct_leakage_channel(int kappa);
const LeakageChannel& cc_leakage_channel(int kappa);

// c3 (1 - 3 cos^2 theta) / (-2 r^3): equals c3 / r^3 on the axis.
double leakage_coupling(const LeakageChannel& ch, double theta, double r);

// Drive derived from the resonant exchange |c3_ref| / r^3.
DriveParams leakage_drive(double radius);

// Pure-state population lost from |p_c 1_t> over the Omega_t pulses 1<->s
// and 0<->s with the control on the axis at distance r_ct.
double leakage_ct_rotation_error(int kappa, double r_ct, const DriveParams& drive,
                                 double coupling_scale = 1.0);

// Population lost from |0 0> for two controls at distance d_cc under the
// control pulse, an idle gap of 3 pi / Omega_t and the reverse pulse.
double leakage_cc_error(int kappa, double d_cc, const DriveParams& drive,
                        double coupling_scale = 1.0);

struct LeakageSelection {
  std::vector<int> ct_kappas{1, 2};
  int cc_kappa = 1;  // 0 disables the control-control channel
};

LeakageTerms gate_leakage_terms(const Geometry& g, const LeakageSelection& sel = {});

FidelityResult gate_fidelity_with_leakage(const Geometry& g, const SpeciesParams& sp,
                                          const DriveParams& drive, const TrajectoryConfig& cfg,
                                          const LeakageSelection& sel = {},
                                          DecayConvention conv = DecayConvention::kTotalRate);

struct ScanPoint {
  double x = 0.0;
  double mean = 0.0;       // mean infidelity (or increase, for position scans)
  double std_error = 0.0;
};

enum class Axis { kX, kY, kZ };

struct PositionScanConfig {
  Axis axis = Axis::kX;
  std::vector<double> sigmas;  // um, scanned along `axis`
  double fixed_sigma = 0.27;   // um, on the other two axes
  int samples = 500;
  std::uint64_t seed = 0;
  int workers = 0;
  TrajectoryConfig trajectory{.n_traj = 20};
};

// Infidelity increase over the unperturbed geometry at a fixed drive. Every
// sample reuses the trajectory random numbers of the baseline.
std::vector<ScanPoint> position_error_scan(const Geometry& g0, const SpeciesParams& sp,
                                           const DriveParams& drive, const PositionScanConfig& cfg,
                                           DecayConvention conv = DecayConvention::kTotalRate);

// Whether one draw is shared by all stages of a laser or made per stage.
enum class NoiseSharing { kPerLaser, kPerStage };

struct TechnicalNoise {
  double delta_omega = 0.0;     // relative amplitude bound
  double sigma_phi = 0.0;       // rad
  double temperature_uk = 0.0;  // atom temperature
  NoiseSharing sharing = NoiseSharing::kPerLaser;

  void validate() const;
};

inline constexpr double kTargetWavenumber = 5e6;   // 1/m
inline constexpr double kControlWavenumber = 2e7;  // 1/m
inline constexpr double kRb87MassU = 86.909;

struct DopplerWidths {
  double target = 0.0;   // rad/us
  double control = 0.0;  // rad/us
};

double thermal_velocity(double temperature_uk);  // m/s, one axis
DopplerWidths doppler_widths(double temperature_uk);

// One static realization for the given schedule. Control stages use the
// control laser, all others the target laser.
DriveNoise sample_drive_noise(const TechnicalNoise& noise, const PulseSchedule& sched, int n_controls,
                              Rng& rng);

struct NoiseScanConfig {
  int samples = 500;
  std::uint64_t seed = 0;
  int workers = 0;
  TrajectoryConfig trajectory{.n_traj = 20};
};

// Mean gate infidelity over noise samples; trajectory random numbers are
// shared between samples.
ScanPoint technical_noise_point(const GateModel& model, const PulseSchedule& sched,
                                const TechnicalNoise& noise, const NoiseScanConfig& cfg);

std::vector<ScanPoint> amplitude_noise_scan(const GateModel& model, const PulseSchedule& sched,
                                            const std::vector<double>& delta_omegas,
                                            const NoiseScanConfig& cfg,
                                            NoiseSharing sharing = NoiseSharing::kPerLaser);
std::vector<ScanPoint> phase_noise_scan(const GateModel& model, const PulseSchedule& sched,
                                        const std::vector<double>& sigmas, const NoiseScanConfig& cfg,
                                        NoiseSharing sharing = NoiseSharing::kPerLaser);
std::vector<ScanPoint> doppler_scan(const GateModel& model, const PulseSchedule& sched,
                                    const std::vector<double>& temperatures_uk,
                                    const NoiseScanConfig& cfg);

}  // namespace rydtoff
