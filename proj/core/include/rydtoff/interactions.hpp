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

#include <vector>

#include <Eigen/Core>

#include "rydtoff/geometry.hpp"
#include "rydtoff/physparams.hpp"

namespace rydtoff {

// C3 (1 - 3 cos^2 theta) / R^3, signed.
double u_ct(double theta, double r, double c3);

// C6 / d^6, signed.
double u_cc(double distance, double c6);

struct PairInteractions {
  int n = 0;
  std::vector<double> u_ct;  // per control
  std::vector<double> u_cc;  // packed upper triangle, see pair_index

  static std::size_t pair_index(int j, int k, int n);
  double cc(int j, int k) const { return u_cc[pair_index(j, k, n)]; }
  double min_abs_u_ct() const;
  double max_abs_u_cc() const;
};

// Uses the actual control-target separation of each control, so displaced
// geometries are handled without reference to the nominal radius.
PairInteractions pair_interactions(const Geometry& g, const SpeciesParams& sp);

// min over control pairs (j, j') of min(|U_ct,j|, |U_ct,j'|) / |U_cc,jj'|.
// Returns +inf for a single control.
double chi_min(const PairInteractions& pi);
double chi_min(const Geometry& g, const SpeciesParams& sp);

// Collective interaction matrix in the symmetric Rydberg sector, n in {2, 4}.
Eigen::MatrixXd collective_matrix(int n, double d, double b);

// Closed-form eigenvalues of collective_matrix, ascending.
std::vector<double> collective_energies(int n, double d, double b);

double e2_minus(double d, double b);

// Regular tetrahedron inscribed in the sphere: one vertex at polar angle
// theta in the x-z plane, the opposite face rotated by phi_prime about it.
Geometry regular_tetrahedron(double radius, double theta, double phi_prime);

struct TetrahedronPoint {
  double e2_minus = 0.0;  // with D = sum |U_ct|
  double chi = 0.0;
};

TetrahedronPoint tetrahedron_scan(double theta, double phi_prime, double radius,
                                  const SpeciesParams& sp);

}  // namespace rydtoff
