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

#include <cmath>
#include <vector>

#include "rydtoff/geometry.hpp"
#include "rydtoff/interactions.hpp"
#include "rydtoff/physparams.hpp"

namespace rydtoff::testing {

inline Geometry antipodal(double radius = 5.0) {
  return geometry_from_angles(radius, {{0.0, 0.0}, {kPi, 0.0}});
}

// n = 4 optimum: tetrahedron with a vertex at arccos(sqrt(2/3)).
inline Geometry tetrahedron(double radius = 5.0) {
  return regular_tetrahedron(radius, std::acos(std::sqrt(2.0 / 3.0)), 0.0);
}

// n = 6 optimum: four controls on the equator, two at the poles.
inline Geometry octahedron(double radius = 5.0) {
  return geometry_from_angles(radius, {{kPi / 2, kPi},
                                       {kPi / 2, 3 * kPi / 2},
                                       {kPi / 2, 0.0},
                                       {kPi / 2, kPi / 2},
                                       {0.0, 0.0},
                                       {kPi, 0.0}});
}

inline DriveParams drive_for(const Geometry& g, const SpeciesParams& sp) {
  return derive_drive(pair_interactions(g, sp).min_abs_u_ct());
}

}  // namespace rydtoff::testing
