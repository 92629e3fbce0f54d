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

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "rydtoff/error.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/rng.hpp"
#include "support.hpp"

namespace rydtoff {
namespace {

const SpeciesParams kSp60 = lookup_species(60);

TEST(Kernels, ExchangeStrength) {
  EXPECT_NEAR(units::to_mhz(u_ct(kPi / 2, 5.0, kSp60.c3)), 33.552, 1e-9);
  EXPECT_NEAR(units::to_mhz(u_ct(0.0, 5.0, kSp60.c3)), -67.104, 1e-9);
  EXPECT_NEAR(u_ct(std::acos(1.0 / std::sqrt(3.0)), 5.0, kSp60.c3), 0.0, 1e-10);
  EXPECT_THROW(u_ct(0.0, 0.0, kSp60.c3), Error);
}

TEST(Kernels, VanDerWaals) {
  EXPECT_NEAR(units::to_mhz(std::abs(u_cc(5.0 * std::sqrt(2.0), kSp60.c6))), 0.096, 1e-12);
  EXPECT_NEAR(units::to_mhz(u_cc(10.0, kSp60.c6)), -0.012, 1e-12);
  EXPECT_NEAR(u_cc(14.0, kSp60.c6) / u_cc(7.0, kSp60.c6), 1.0 / 64.0, 1e-15);
  try {
    u_cc(0.0, kSp60.c6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDistance);
  }
}

TEST(PairInteractions, MatchesKernels) {
  Geometry g = testing::octahedron();
  PairInteractions pi = pair_interactions(g, kSp60);
  ASSERT_EQ(pi.u_ct.size(), 6u);
  ASSERT_EQ(pi.u_cc.size(), 15u);
  for (int j = 0; j < 6; ++j) {
    EXPECT_NEAR(pi.u_ct[j], u_ct(polarizing_angle(g.controls[j], g.target), 5.0, kSp60.c3), 1e-12);
    for (int k = j + 1; k < 6; ++k) {
      EXPECT_NEAR(pi.cc(j, k), u_cc((g.controls[j] - g.controls[k]).norm(), kSp60.c6), 1e-15);
    }
  }
  EXPECT_NEAR(units::to_mhz(pi.min_abs_u_ct()), 33.552, 1e-9);
  EXPECT_NEAR(units::to_mhz(pi.max_abs_u_cc()), 0.096, 1e-12);
}

TEST(Chi, Antipodal) { EXPECT_NEAR(chi_min(testing::antipodal(), kSp60), 5592.0, 1e-6); }

TEST(Chi, Octahedron) { EXPECT_NEAR(chi_min(testing::octahedron(), kSp60), 349.5, 1e-9); }

TEST(Chi, Honeycomb) {
  Geometry g = honeycomb_comparison(5.0);
  PairInteractions pi = pair_interactions(g, kSp60);
  for (double u : pi.u_ct) EXPECT_NEAR(units::to_mhz(std::abs(u)), 33.552, 1e-9);
  EXPECT_NEAR(units::to_mhz(pi.max_abs_u_cc()), 0.768, 1e-12);
  EXPECT_NEAR(chi_min(g, kSp60), 43.6875, 1e-9);
}

TEST(Chi, SingleControlIsInfinite) {
  Geometry g = geometry_from_angles(5.0, {{0.3, 0.2}});
  EXPECT_EQ(chi_min(g, kSp60), std::numeric_limits<double>::infinity());
}

TEST(Chi, RotationInvariant) {
  Rng rng = make_rng(21, {});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SphericalPoint> pts;
    for (int j = 0; j < 5; ++j) pts.push_back({uniform(rng, 0, kPi), uniform(rng, 0, kTwoPi)});
    Geometry g = geometry_from_angles(5.0, pts);
    double a = chi_min(g, kSp60);
    double b = chi_min(rotate_about_z(g, uniform(rng, 0, kTwoPi)), kSp60);
    EXPECT_NEAR(a, b, 1e-9 * a);
  }
}

TEST(Collective, DiagonalLimit) {
  auto e = collective_energies(2, 0.0, 3.0);
  EXPECT_NEAR(e[0], 0.0, 1e-15);
  EXPECT_NEAR(e[1], 3.0, 1e-15);
}

std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(v.begin(), v.end());
  return v;
}

TEST(Collective, ClosedFormMatchesDiagonalization) {
  Rng rng = make_rng(1234, {});
  for (int n : {2, 4}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const double d = uniform(rng, -100.0, 100.0);
      const double b = uniform(rng, -10.0, 10.0);
      auto closed = collective_energies(n, d, b);
      auto dense = dense_eigenvalues(collective_matrix(n, d, b));
      ASSERT_EQ(closed.size(), dense.size());
      const double scale = std::max({std::abs(d), std::abs(b), 1.0});
      for (std::size_t i = 0; i < closed.size(); ++i) {
        EXPECT_NEAR(closed[i], dense[i], 1e-12 * scale) << "n=" << n << " D=" << d << " B=" << b;
      }
    }
  }
}

TEST(Collective, FourControlFormulas) {
  const double d = 7.0, b = -0.3;
  auto e = collective_energies(4, d, b);
  const std::vector<double> expected = {
      (b - std::sqrt(b * b + 54 * d * d)) / 12, (3 * b - std::sqrt(b * b + 4 * d * d)) / 4,
      (b + std::sqrt(b * b + 54 * d * d)) / 12, (3 * b + std::sqrt(b * b + 4 * d * d)) / 4};
  auto sorted = expected;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e[i], sorted[i], 1e-12);
  EXPECT_NEAR(e2_minus(d, b), expected[0], 1e-14);
}

TEST(Collective, UnsupportedSizes) {
  for (int n : {1, 3, 6}) {
    try {
      collective_matrix(n, 1.0, 1.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kUnsupportedN);
    }
  }
}

TEST(Collective, AntipodalPairPrefersPoles) {
  // Rigid antipodal pair at polar angle theta; E_- is lowest on the axis.
  double best = std::numeric_limits<double>::infinity(), best_theta = -1;
  for (int i = 0; i <= 360; ++i) {
    const double th = kPi * i / 360.0;
    Geometry g;
    g.radius = 5.0;
    g.controls = {to_cartesian({th, 0.0}, 5.0), to_cartesian({kPi - th, kPi}, 5.0)};
    PairInteractions pi = pair_interactions(g, kSp60);
    double e = collective_energies(2, pi.u_ct[0] + pi.u_ct[1], pi.u_cc[0])[0];
    if (e < best - 1e-12) {
      best = e;
      best_theta = th;
    }
  }
  EXPECT_TRUE(best_theta < 1e-9 || std::abs(best_theta - kPi) < 1e-9) << best_theta;
}

TEST(Tetrahedron, OptimalOrientations) {
  const double t1 = std::acos(std::sqrt(2.0 / 3.0));
  const double t2 = std::acos(1.0 / 3.0);
  EXPECT_NEAR(tetrahedron_scan(t1, 0.0, 5.0, kSp60).chi, 828.44, 0.01);
  EXPECT_NEAR(tetrahedron_scan(t2, 0.0, 5.0, kSp60).chi, 552.30, 0.01);
  EXPECT_NEAR(chi_min(testing::tetrahedron(), kSp60), 828.44, 0.01);
}

TEST(Tetrahedron, VerticesAreRegular) {
  Geometry g = regular_tetrahedron(5.0, 0.7, 1.1);
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(g.controls[j].norm(), 5.0, 1e-12);
    for (int k = j + 1; k < 4; ++k) {
      EXPECT_NEAR((g.controls[j] - g.controls[k]).norm(), 5.0 * std::sqrt(8.0 / 3.0), 1e-12);
    }
  }
}

double max_over_phi(double theta) {
  double m = 0.0;
  for (int k = 0; k < 2400; ++k) {
    m = std::max(m, std::abs(tetrahedron_scan(theta, kTwoPi * k / 2400, 5.0, kSp60).e2_minus));
  }
  return m;
}

TEST(Tetrahedron, ScanMaximaLocations) {
  const double t1 = std::acos(std::sqrt(2.0 / 3.0));
  const double t2 = std::acos(1.0 / 3.0);
  double global = 0.0;
  for (int i = 1; i <= 90; ++i) global = std::max(global, max_over_phi(kPi / 2 * i / 90));
  for (double th : {t1, t2, kPi / 2}) global = std::max(global, max_over_phi(th));
  for (double th : {t1, t2, kPi / 2}) EXPECT_NEAR(max_over_phi(th), global, 1e-5 * global) << th;
  for (double th : {0.2, 0.45, 1.0, 1.35}) EXPECT_LT(max_over_phi(th), global * (1 - 1e-4)) << th;
}

}  // namespace
}  // namespace rydtoff
