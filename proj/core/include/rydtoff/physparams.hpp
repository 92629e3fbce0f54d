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

#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

// Internal units: lengths in um, times in us, frequencies as angular
// frequencies in rad/us, hbar = 1.

namespace rydtoff {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace units {

// "X/2pi in GHz" (times any power of um) to rad/us.
constexpr double from_ghz(double ghz) { return kTwoPi * 1e3 * ghz; }
constexpr double to_ghz(double omega) { return omega / (kTwoPi * 1e3); }

// "X/2pi in MHz" to rad/us.
constexpr double from_mhz(double mhz) { return kTwoPi * mhz; }
constexpr double to_mhz(double omega) { return omega / kTwoPi; }

// Decay rates quoted in kHz are rates of 1e3 s^-1, not angular frequencies.
constexpr double from_khz_rate(double khz) { return khz * 1e-3; }
constexpr double to_khz_rate(double rate) { return rate * 1e3; }

}  // namespace units

struct SpeciesParams {
  int m = 0;
  double c6 = 0.0;       // rad/us um^6, signed
  double c3 = 0.0;       // rad/us um^3
  double gamma_s = 0.0;  // 1/us
  double gamma_p = 0.0;  // 1/us
};

struct DriveParams {
  double omega_t = 0.0;
  double omega_c = 0.0;
  double t_det = 0.0;
};

class SpeciesTable {
 public:
  // Rows of whitespace-separated key=value pairs with keys m, C6, C3,
  // gamma_s, gamma_p in the tabulated units; '#' starts a comment.
  static SpeciesTable parse(std::string_view text);
  static SpeciesTable from_file(const std::string& path);
  static const SpeciesTable& builtin();

  const SpeciesParams& lookup(int m) const;
  bool contains(int m) const { return rows_.count(m) != 0; }
  std::vector<int> principal_numbers() const;

 private:
  std::map<int, SpeciesParams> rows_;
};

SpeciesParams lookup_species(int m);

// Omega_t = u/20, Omega_c = 5u for the weakest |U_ct| = u.
DriveParams derive_drive(double u_ct_min);

// t_det = 2pi/Omega_c + 3pi/Omega_t.
double gate_duration(double omega_t, double omega_c);

}  // namespace rydtoff
