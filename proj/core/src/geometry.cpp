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

#include "rydtoff/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>

#include <json.hpp>

#include "rydtoff/error.hpp"
#include "rydtoff/physparams.hpp"

namespace rydtoff {

double wrap_phi(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

SphericalPoint SphericalPoint::normalized(double theta, double phi) {
  return {std::clamp(theta, 0.0, kPi), wrap_phi(phi)};
}

void Geometry::validate() const {
  if (!(radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "geometry radius must be positive");
  if (controls.empty()) throw Error(ErrorCode::kInvalidArgument, "geometry needs at least one control");
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if ((controls[i] - target).norm() <= kTol) {
      throw Error(ErrorCode::kCoincidentAtoms, "control " + std::to_string(i) + " sits on the target");
    }
    for (std::size_t j = i + 1; j < controls.size(); ++j) {
      if ((controls[i] - controls[j]).norm() <= kTol) {
        throw Error(ErrorCode::kCoincidentAtoms,
                    "controls " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

Vec3 to_cartesian(const SphericalPoint& p, double radius) {
  double st = std::sin(p.theta);
  return {radius * st * std::cos(p.phi), radius * st * std::sin(p.phi), radius * std::cos(p.theta)};
}

SphericalPoint to_spherical(const Vec3& v) {
  double r = v.norm();
  if (r == 0.0) return {0.0, 0.0};
  double theta = std::acos(std::clamp(v.z() / r, -1.0, 1.0));
  return {theta, wrap_phi(std::atan2(v.y(), v.x()))};
}

double polarizing_angle(const Vec3& a, const Vec3& b) {
  Vec3 d = a - b;
  double r = d.norm();
  if (r == 0.0) throw Error(ErrorCode::kCoincidentAtoms, "polarizing angle of coincident atoms");
  return std::acos(std::clamp(d.z() / r, -1.0, 1.0));
}

Geometry geometry_from_angles(double radius, const std::vector<SphericalPoint>& controls) {
  Geometry g;
  g.radius = radius;
  g.controls.reserve(controls.size());
  for (const auto& p : controls) g.controls.push_back(to_cartesian(p, radius));
  return g;
}

std::vector<SphericalPoint> control_angles(const Geometry& g) {
  std::vector<SphericalPoint> out;
  out.reserve(g.controls.size());
  for (const auto& c : g.controls) out.push_back(to_spherical(c - g.target));
  return out;
}

Geometry planar_ring(double radius, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "ring needs at least one control");
  std::vector<SphericalPoint> pts;
  for (int k = 0; k < n; ++k) pts.push_back({kPi / 2.0, k * kTwoPi / n});
  return geometry_from_angles(radius, pts);
}

Geometry honeycomb_comparison(double radius) { return planar_ring(radius, 6); }

Geometry rotate_about_z(const Geometry& g, double angle) {
  Eigen::Matrix3d rot = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
  Geometry out = g;
  for (auto& c : out.controls) c = rot * c;
  out.target = rot * g.target;
  return out;
}

Geometry sample_displaced(const Geometry& g, const PositionNoise& noise, Rng& rng) {
  if (noise.sigma_x < 0 || noise.sigma_y < 0 || noise.sigma_z < 0) {
    throw Error(ErrorCode::kInvalidArgument, "position noise widths must be non-negative");
  }
  auto draw = [&](Vec3& r) {
    r.x() += noise.sigma_x * gaussian(rng);
    r.y() += noise.sigma_y * gaussian(rng);
    r.z() += noise.sigma_z * gaussian(rng);
  };
  Geometry out = g;
  for (auto& c : out.controls) draw(c);
  draw(out.target);
  return out;
}

std::string geometry_to_json(const Geometry& g, int indent) {
  nlohmann::json j;
  j["radius_um"] = g.radius;
  j["controls"] = nlohmann::json::array();
  for (const auto& c : g.controls) j["controls"].push_back({c.x(), c.y(), c.z()});
  j["target"] = {g.target.x(), g.target.y(), g.target.z()};
  return j.dump(indent);
}

namespace {

Vec3 parse_point(const nlohmann::json& v) {
  if (!v.is_array() || v.size() != 3) throw Error(ErrorCode::kParse, "geometry: expected [x, y, z]");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

Geometry geometry_from_json(std::string_view text) {
  Geometry g;
  try {
    auto j = nlohmann::json::parse(text);
    g.radius = j.at("radius_um").get<double>();
    for (const auto& c : j.at("controls")) g.controls.push_back(parse_point(c));
    if (j.contains("target")) g.target = parse_point(j["target"]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("geometry json: ") + e.what());
  }
  g.validate();
  return g;
}

Geometry load_geometry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open geometry file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return geometry_from_json(buf.str());
}

void save_geometry(const Geometry& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << geometry_to_json(g) << '\n';
}

}  // namespace rydtoff
