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

#include "rydtoff/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>

#include "rydtoff/error.hpp"

namespace rydtoff {

double u_ct(double theta, double r, double c3) {
  if (!(r > 0.0)) throw Error(ErrorCode::kZeroDistance, "u_ct at zero distance");
  double c = std::cos(theta);
  return c3 * (1.0 - 3.0 * c * c) / (r * r * r);
}

double u_cc(double distance, double c6) {
  if (!(distance > 0.0)) throw Error(ErrorCode::kZeroDistance, "u_cc at zero distance");
  double d3 = distance * distance * distance;
  return c6 / (d3 * d3);
}

std::size_t PairInteractions::pair_index(int j, int k, int n) {
  if (j > k) std::swap(j, k);
  return static_cast<std::size_t>(j) * (2 * n - j - 1) / 2 + (k - j - 1);
}

double PairInteractions::min_abs_u_ct() const {
  double m = std::numeric_limits<double>::infinity();
  for (double u : u_ct) m = std::min(m, std::abs(u));
  return m;
}

double PairInteractions::max_abs_u_cc() const {
  double m = 0.0;
  for (double u : u_cc) m = std::max(m, std::abs(u));
  return m;
}

PairInteractions pair_interactions(const Geometry& g, const SpeciesParams& sp) {
  PairInteractions pi;
  pi.n = g.n();
  pi.u_ct.resize(g.controls.size());
  for (int j = 0; j < pi.n; ++j) {
    Vec3 d = g.controls[j] - g.target;
    double r = d.norm();
    if (r == 0.0) throw Error(ErrorCode::kCoincidentAtoms, "control on top of target");
    double c = d.z() / r;
    pi.u_ct[j] = sp.c3 * (1.0 - 3.0 * c * c) / (r * r * r);
  }
  pi.u_cc.resize(static_cast<std::size_t>(pi.n) * (pi.n - 1) / 2);
  for (int j = 0; j < pi.n; ++j) {
    for (int k = j + 1; k < pi.n; ++k) {
      double d = (g.controls[j] - g.controls[k]).norm();
      if (d == 0.0) throw Error(ErrorCode::kCoincidentAtoms, "coincident controls");
      pi.u_cc[PairInteractions::pair_index(j, k, pi.n)] = u_cc(d, sp.c6);
    }
  }
  return pi;
}

double chi_min(const PairInteractions& pi) {
  double chi = std::numeric_limits<double>::infinity();
  for (int j = 0; j < pi.n; ++j) {
    for (int k = j + 1; k < pi.n; ++k) {
      double ct = std::min(std::abs(pi.u_ct[j]), std::abs(pi.u_ct[k]));
      chi = std::min(chi, ct / std::abs(pi.cc(j, k)));
    }
  }
  return chi;
}

double chi_min(const Geometry& g, const SpeciesParams& sp) {
  return chi_min(pair_interactions(g, sp));
}

Eigen::MatrixXd collective_matrix(int n, double d, double b) {
  if (n == 2) {
    Eigen::MatrixXd h(2, 2);
    double c = d / std::sqrt(2.0);
    h << 0.0, c, c, b;
    return h;
  }
  if (n == 4) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(4, 4);
    double c = std::sqrt(3.0) / (2.0 * std::sqrt(2.0)) * d;
    h(0, 1) = h(1, 0) = c;
    h(1, 1) = b / 6.0;
    h(2, 2) = b / 2.0;
    h(2, 3) = h(3, 2) = d / 2.0;
    h(3, 3) = b;
    return h;
  }
  throw Error(ErrorCode::kUnsupportedN, "collective matrix only for n = 2 or 4");
}

double e2_minus(double d, double b) { return (b - std::sqrt(b * b + 54.0 * d * d)) / 12.0; }

std::vector<double> collective_energies(int n, double d, double b) {
  std::vector<double> e;
  if (n == 2) {
    double s = std::sqrt(b * b + 2.0 * d * d);
    e = {(b - s) / 2.0, (b + s) / 2.0};
  } else if (n == 4) {
    double s1 = std::sqrt(b * b + 4.0 * d * d);
    double s2 = std::sqrt(b * b + 54.0 * d * d);
    e = {(3.0 * b - s1) / 4.0, (3.0 * b + s1) / 4.0, (b - s2) / 12.0, (b + s2) / 12.0};
  } else {
    throw Error(ErrorCode::kUnsupportedN, "collective energies only for n = 2 or 4");
  }
  std::sort(e.begin(), e.end());
  return e;
}

Geometry regular_tetrahedron(double radius, double theta, double phi_prime) {
  Vec3 z(std::sin(theta), 0.0, std::cos(theta));
  Vec3 y = Vec3::UnitY();
  Vec3 x = y.cross(z);
  const double ca = -1.0 / 3.0;
  const double sa = std::sqrt(1.0 - ca * ca);
  Geometry g;
  g.radius = radius;
  g.controls.push_back(radius * z);
  for (int k = 0; k < 3; ++k) {
    double a = phi_prime + k * kTwoPi / 3.0;
    g.controls.push_back(radius * (ca * z + sa * (std::cos(a) * x + std::sin(a) * y)));
  }
  return g;
}

TetrahedronPoint tetrahedron_scan(double theta, double phi_prime, double radius,
                                  const SpeciesParams& sp) {
  Geometry g = regular_tetrahedron(radius, theta, phi_prime);
  PairInteractions pi = pair_interactions(g, sp);
  double d = 0.0;
  for (double u : pi.u_ct) d += std::abs(u);
  double b = 0.0;
  for (double u : pi.u_cc) b += u;
  return {e2_minus(d, b), chi_min(pi)};
}

}  // namespace rydtoff
