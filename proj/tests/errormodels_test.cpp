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

#include <gtest/gtest.h>

#include "rydtoff/error.hpp"
#include "rydtoff/errormodels.hpp"
#include "rydtoff/interactions.hpp"
#include "support.hpp"

namespace rydtoff {
namespace {

const SpeciesParams kSp60 = lookup_species(60);

TEST(LeakageTables, Rows) {
  const auto& ct = ct_leakage_channels();
  const auto& cc = cc_leakage_channels();
  const double ct_c3[] = {-9.134, -9.254, -3.926, -0.14};
  const double ct_delta[] = {0.8771, 7.8032, 8.6142, 5.3452};
  const double cc_c3[] = {4.301, 5.919, 3.203, 4.408};
  const double cc_delta[] = {0.2784, 7.0614, 7.4587, 14.8012};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(ct[k].kappa, k + 1);
    EXPECT_NEAR(units::to_ghz(ct[k].c3), ct_c3[k], 1e-12);
    EXPECT_NEAR(units::to_ghz(ct[k].delta), ct_delta[k], 1e-12);
    EXPECT_NEAR(units::to_ghz(cc[k].c3), cc_c3[k], 1e-12);
    EXPECT_NEAR(units::to_ghz(cc[k].delta), cc_delta[k], 1e-12);
  }
  EXPECT_NEAR(units::to_ghz(ct_reference_c3()), -8.388, 1e-12);
  EXPECT_THROW(ct_leakage_channel(0), Error);
  EXPECT_THROW(cc_leakage_channel(5), Error);
}

TEST(LeakageTables, RatioColumn) {
  // B / delta at R = 5 on the axis.
  const double expected[] = {8.3e-2, 9.5e-3, 3.6e-3, 2.1e-4};
  for (int k = 1; k <= 4; ++k) {
    const auto& ch = ct_leakage_channel(k);
    EXPECT_NEAR(std::abs(leakage_coupling(ch, 0.0, 5.0)) / ch.delta, expected[k - 1], 0.05 * expected[k - 1]);
  }
}

TEST(LeakageCoupling, AngleLaw) {
  const auto& ch = ct_leakage_channel(1);
  EXPECT_NEAR(leakage_coupling(ch, 0.0, 5.0), ch.c3 / 125.0, 1e-12);
  EXPECT_NEAR(leakage_coupling(ch, kPi, 5.0), ch.c3 / 125.0, 1e-12);
  EXPECT_NEAR(leakage_coupling(ch, kPi / 2, 5.0), -0.5 * ch.c3 / 125.0, 1e-12);
  EXPECT_NEAR(leakage_coupling(ch, std::acos(1 / std::sqrt(3.0)), 5.0), 0.0, 1e-12);
}

TEST(LeakageDrive, FromResonantExchange) {
  DriveParams d = leakage_drive(5.0);
  EXPECT_NEAR(units::to_mhz(d.omega_t), 8388.0 / 125.0 / 20.0, 1e-9);
  EXPECT_NEAR(d.omega_c, 100 * d.omega_t, 1e-9);
}

// Frozen from an independent dense model of the same pair Hamiltonians.
TEST(Leakage, ControlTargetRotation) {
  const double expected[] = {2.5833244388839827e-04, 2.5989328208908535e-04, 7.3682182311074484e-06,
                             2.40686184538319e-07};
  DriveParams d = leakage_drive(5.0);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(leakage_ct_rotation_error(k, 5.0, d), expected[k - 1], 1e-6 * expected[k - 1]) << k;
  }
}

TEST(Leakage, ControlControl) {
  const double far[] = {2.57336503737271e-05, 5.716538353794931e-10, 4.633959882482941e-11,
                        4.2792436261152034e-11};
  const double near[] = {3.425726847143551e-02, 1.9836120295213533e-06, 1.791044266230557e-07,
                         1.6255344559290563e-07};
  DriveParams d = leakage_drive(5.0);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_NEAR(leakage_cc_error(k, 10.0, d), far[k - 1], 1e-6 * far[k - 1] + 1e-11) << k;
    EXPECT_NEAR(leakage_cc_error(k, 5.0, d), near[k - 1], 1e-6 * near[k - 1] + 1e-11) << k;
  }
}

TEST(Leakage, PairTableNearDistance) {
  EXPECT_NEAR(leakage_cc_error(1, 5.0, leakage_drive(5.0)), 3.21e-2, 0.1 * 3.21e-2);
}

TEST(Leakage, SwitchedOffChannelLeavesBareBlockade) {
  DriveParams d = leakage_drive(5.0);
  const double bare = leakage_ct_rotation_error(1, 5.0, d, 0.0);
  EXPECT_LT(bare, leakage_ct_rotation_error(1, 5.0, d));
  EXPECT_LT(leakage_cc_error(1, 5.0, d, 0.0), 1e-12);
}

TEST(Leakage, FourthOrderInfidelityScaling) {
  // The infidelity is the square of a B^2/delta light shift.
  DriveParams d = leakage_drive(5.0);
  for (int k : {2, 3, 4}) {
    for (double dcc : {7.0, 10.0}) {
      double ratio = leakage_cc_error(k, dcc, d, 2.0) / leakage_cc_error(k, dcc, d);
      EXPECT_NEAR(ratio, 16.0, 2.5) << k << " " << dcc;
    }
  }
}

TEST(Leakage, InvalidArguments) {
  DriveParams d = leakage_drive(5.0);
  EXPECT_THROW(leakage_ct_rotation_error(0, 5.0, d), Error);
  EXPECT_THROW(leakage_cc_error(1, 0.0, d), Error);
}

TEST(GateLeakage, TermsFollowGeometry) {
  Geometry g = testing::tetrahedron();
  LeakageTerms t = gate_leakage_terms(g);
  ASSERT_EQ(t.ct.size(), 2u);
  ASSERT_TRUE(t.cc.has_value());
  EXPECT_EQ(t.cc->coupling.size(), 6u);
  for (int j = 0; j < 4; ++j) {
    double th = polarizing_angle(g.controls[j], g.target);
    EXPECT_NEAR(t.ct[0].coupling[j], leakage_coupling(ct_leakage_channel(1), th, 5.0), 1e-12);
  }
  EXPECT_FALSE(gate_leakage_terms(g, {{}, 0}).cc.has_value());
}

TEST(GateLeakage, NoChannelsRecoversPlainGate) {
  Geometry g = testing::antipodal();
  DriveParams d = testing::drive_for(g, kSp60);
  TrajectoryConfig cfg{.n_traj = 50, .seed = 4};
  FidelityResult plain = GateSimulator(GateModel::from_geometry(g, kSp60), PulseSchedule::standard(d)).average_fidelity(cfg);
  FidelityResult off = gate_fidelity_with_leakage(g, kSp60, d, cfg, {{}, 0});
  EXPECT_EQ(off.mean, plain.mean);
  FidelityResult on = gate_fidelity_with_leakage(g, kSp60, d, cfg);
  EXPECT_LT(on.mean, plain.mean);
}

TEST(Doppler, Widths) {
  DopplerWidths w = doppler_widths(50.0);
  EXPECT_NEAR(w.target, 0.346, 0.03 * 0.346);
  EXPECT_NEAR(w.control, 1.382, 0.03 * 1.382);
  EXPECT_NEAR(w.control / w.target, 4.0, 1e-12);
  EXPECT_EQ(doppler_widths(0.0).target, 0.0);
}

TEST(Doppler, SamplerSpread) {
  TechnicalNoise noise{.temperature_uk = 50.0};
  PulseSchedule p = PulseSchedule::standard(derive_drive(units::from_mhz(33.552)));
  Rng rng = make_rng(6, {});
  const int samples = 10000;
  double st = 0, sc = 0;
  for (int i = 0; i < samples; ++i) {
    DriveNoise d = sample_drive_noise(noise, p, 1, rng);
    sc += d.detuning[0] * d.detuning[0];
    st += d.detuning[1] * d.detuning[1];
  }
  const double v = thermal_velocity(50.0);
  EXPECT_NEAR(std::sqrt(st / samples), kTargetWavenumber * v * 1e-6, 0.03 * kTargetWavenumber * v * 1e-6);
  EXPECT_NEAR(std::sqrt(sc / samples), kControlWavenumber * v * 1e-6, 0.03 * kControlWavenumber * v * 1e-6);
}

TEST(TechnicalNoise, DrawSharing) {
  PulseSchedule p = PulseSchedule::standard(derive_drive(units::from_mhz(33.552)));
  Rng rng = make_rng(2, {});
  DriveNoise laser = sample_drive_noise(TechnicalNoise{.delta_omega = 0.1, .sigma_phi = 0.2}, p, 2, rng);
  ASSERT_EQ(laser.stage_factor.size(), 5u);
  EXPECT_EQ(laser.stage_factor[0], laser.stage_factor[4]);
  EXPECT_EQ(laser.stage_factor[1], laser.stage_factor[3]);
  EXPECT_NE(laser.stage_factor[0], laser.stage_factor[1]);
  for (const auto& f : laser.stage_factor) EXPECT_LE(std::abs(std::abs(f) - 1.0), 0.1);
  DriveNoise stage = sample_drive_noise(
      TechnicalNoise{.delta_omega = 0.1, .sharing = NoiseSharing::kPerStage}, p, 2, rng);
  EXPECT_NE(stage.stage_factor[0], stage.stage_factor[4]);
  EXPECT_TRUE(sample_drive_noise(TechnicalNoise{}, p, 2, rng).stage_factor.empty());
  EXPECT_THROW(TechnicalNoise{.delta_omega = -1}.validate(), Error);
}

TEST(TechnicalNoise, ZeroNoiseIsBaseline) {
  Geometry g = testing::antipodal();
  DriveParams d = testing::drive_for(g, kSp60);
  GateModel m = GateModel::from_geometry(g, kSp60);
  PulseSchedule p = PulseSchedule::standard(d);
  NoiseScanConfig cfg;
  cfg.samples = 3;
  cfg.trajectory.n_traj = 20;
  ScanPoint pt = technical_noise_point(m, p, TechnicalNoise{}, cfg);
  double base = 1 - GateSimulator(m, p).average_fidelity(cfg.trajectory).mean;
  EXPECT_DOUBLE_EQ(pt.mean, base);
  EXPECT_EQ(pt.std_error, 0.0);
}

TEST(TechnicalNoise, ScansDeterministic) {
  Geometry g = testing::antipodal();
  GateModel m = GateModel::from_geometry(g, kSp60);
  PulseSchedule p = PulseSchedule::standard(testing::drive_for(g, kSp60));
  NoiseScanConfig a;
  a.samples = 6;
  a.seed = 12;
  a.trajectory.n_traj = 10;
  a.workers = 1;
  NoiseScanConfig b = a;
  b.workers = 3;
  auto ra = amplitude_noise_scan(m, p, {0.05, 0.1}, a);
  auto rb = amplitude_noise_scan(m, p, {0.05, 0.1}, b);
  ASSERT_EQ(ra.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(ra[i].mean, rb[i].mean);
    EXPECT_EQ(ra[i].x, rb[i].x);
  }
  EXPECT_LT(ra[0].mean, ra[1].mean);
  auto pa = phase_noise_scan(m, p, {0.1}, a, NoiseSharing::kPerStage);
  auto pb = phase_noise_scan(m, p, {0.1}, b, NoiseSharing::kPerStage);
  EXPECT_EQ(pa[0].mean, pb[0].mean);
  auto da = doppler_scan(m, p, {50.0}, a);
  auto db = doppler_scan(m, p, {50.0}, b);
  EXPECT_EQ(da[0].mean, db[0].mean);
}

TEST(PositionScan, ZeroSigmaIsZeroIncrease) {
  Geometry g = testing::antipodal();
  PositionScanConfig cfg;
  cfg.sigmas = {0.0};
  cfg.fixed_sigma = 0.0;
  cfg.samples = 3;
  auto r = position_error_scan(g, kSp60, testing::drive_for(g, kSp60), cfg);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].mean, 0.0);
}

TEST(PositionScan, GrowsWithSpread) {
  Geometry g = planar_ring(5.0, 2);
  PositionScanConfig cfg;
  cfg.sigmas = {0.2, 1.5};
  cfg.samples = 40;
  cfg.seed = 3;
  cfg.trajectory.n_traj = 5;
  auto r = position_error_scan(g, kSp60, testing::drive_for(g, kSp60), cfg);
  EXPECT_LT(r[0].mean, r[1].mean);
  EXPECT_GT(r[1].std_error, 0.0);
  cfg.fixed_sigma = -1.0;
  EXPECT_THROW(position_error_scan(g, kSp60, testing::drive_for(g, kSp60), cfg), Error);
}

}  // namespace
}  // namespace rydtoff
