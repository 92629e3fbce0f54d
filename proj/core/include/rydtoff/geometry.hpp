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

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rydtoff/rng.hpp"

namespace rydtoff {

using Vec3 = Eigen::Vector3d;

struct SphericalPoint {
  double theta = 0.0;
  double phi = 0.0;

  // theta clamped to [0, pi], phi reduced to [0, 2pi).
  static SphericalPoint normalized(double theta, double phi);
};

double wrap_phi(double phi);

struct Geometry {
  double radius = 0.0;
  std::vector<Vec3> controls;
  Vec3 target = Vec3::Zero();

  int n() const { return static_cast<int>(controls.size()); }

  // Throws CoincidentAtoms if two atoms share a position, InvalidArgument if
  // there are no controls or the radius is not positive.
  void validate() const;
};

struct PositionNoise {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma_z = 0.0;
};

Vec3 to_cartesian(const SphericalPoint& p, double radius);

// Angles of v as seen from the origin; theta = 0 for the zero vector.
SphericalPoint to_spherical(const Vec3& v);

// Angle in [0, pi] between a - b and the quantization axis z.
double polarizing_angle(const Vec3& a, const Vec3& b);

Geometry geometry_from_angles(double radius, const std::vector<SphericalPoint>& controls);
std::vector<SphericalPoint> control_angles(const Geometry& g);

// Regular n-gon of circumradius R in the x-y plane around the target.
Geometry planar_ring(double radius, int n);
// Regular hexagon of circumradius R in the x-y plane around the target.
Geometry honeycomb_comparison(double radius);

Geometry rotate_about_z(const Geometry& g, double angle);

// Independent Gaussian displacement of every atom, target included.
Geometry sample_displaced(const Geometry& g, const PositionNoise& noise, Rng& rng);

std::string geometry_to_json(const Geometry& g, int indent = 2);
Geometry geometry_from_json(std::string_view text);
Geometry load_geometry(const std::string& path);
void save_geometry(const Geometry& g, const std::string& path);

}  // namespace rydtoff
