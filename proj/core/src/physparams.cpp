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

#include "rydtoff/physparams.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rydtoff/error.hpp"

namespace rydtoff {

namespace detail {
extern const std::string_view kSpeciesTable;
}  // namespace detail

namespace {

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) {
    throw Error(ErrorCode::kParse, "species table: bad value for " + key + ": '" + value + "'");
  }
  return v;
}

}  // namespace

SpeciesTable SpeciesTable::parse(std::string_view text) {
  SpeciesTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tok;
    std::map<std::string, std::string> kv;
    while (fields >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::kParse,
                    "species table line " + std::to_string(line_no) + ": expected key=value, got '" + tok + "'");
      }
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    if (kv.empty()) continue;
    for (const char* key : {"m", "C6", "C3", "gamma_s", "gamma_p"}) {
      if (!kv.count(key)) {
        throw Error(ErrorCode::kParse,
                    "species table line " + std::to_string(line_no) + ": missing key " + key);
      }
    }
    SpeciesParams sp;
    double m = parse_double("m", kv["m"]);
    sp.m = static_cast<int>(m);
    if (sp.m != m) throw Error(ErrorCode::kParse, "species table: non-integer m");
    sp.c6 = units::from_ghz(parse_double("C6", kv["C6"]));
    sp.c3 = units::from_ghz(parse_double("C3", kv["C3"]));
    sp.gamma_s = units::from_khz_rate(parse_double("gamma_s", kv["gamma_s"]));
    sp.gamma_p = units::from_khz_rate(parse_double("gamma_p", kv["gamma_p"]));
    table.rows_[sp.m] = sp;
  }
  if (table.rows_.empty()) throw Error(ErrorCode::kParse, "species table is empty");
  return table;
}

SpeciesTable SpeciesTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open species table " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const SpeciesTable& SpeciesTable::builtin() {
  static const SpeciesTable table = parse(detail::kSpeciesTable);
  return table;
}

const SpeciesParams& SpeciesTable::lookup(int m) const {
  auto it = rows_.find(m);
  if (it == rows_.end()) {
    throw Error(ErrorCode::kUnknownSpecies, "no tabulated species for m=" + std::to_string(m));
  }
  return it->second;
}

std::vector<int> SpeciesTable::principal_numbers() const {
  std::vector<int> out;
  for (const auto& [m, row] : rows_) out.push_back(m);
  return out;
}

SpeciesParams lookup_species(int m) { return SpeciesTable::builtin().lookup(m); }

double gate_duration(double omega_t, double omega_c) {
  return kTwoPi / omega_c + 3.0 * kPi / omega_t;
}

DriveParams derive_drive(double u_ct_min) {
  if (!(u_ct_min > 0.0) || !std::isfinite(u_ct_min)) {
    throw Error(ErrorCode::kNonPositiveInteraction, "derive_drive needs a positive |U_ct|");
  }
  DriveParams d;
  d.omega_t = u_ct_min / 20.0;
  d.omega_c = 5.0 * u_ct_min;
  d.t_det = gate_duration(d.omega_t, d.omega_c);
  return d;
}

}  // namespace rydtoff
