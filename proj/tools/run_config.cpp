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

#include "run_config.hpp"

#include <algorithm>
#include <fstream>

#include "rydtoff/error.hpp"

namespace rydtoff::cli {

nlohmann::json RunConfig::to_json() const {
  nlohmann::json opts = nlohmann::json::object();
  for (const auto& [name, get] : getters_) opts[name] = get();
  return {{"command", command_}, {"options", opts}};
}

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> replay_arguments(const nlohmann::json& config) {
  if (!config.is_object() || !config.contains("command") || !config.contains("options")) {
    throw Error(ErrorCode::kParse, "run config needs \"command\" and \"options\"");
  }
  std::vector<std::string> args{config["command"].get<std::string>()};
  for (const auto& [name, v] : config["options"].items()) {
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back("--" + name);
    } else if (v.is_array()) {
      if (v.empty()) continue;
      std::string joined;
      for (const auto& e : v) joined += (joined.empty() ? "" : ",") + scalar_text(e);
      args.push_back("--" + name);
      args.push_back(joined);
    } else if (!(v.is_string() && v.get<std::string>().empty())) {
      args.push_back("--" + name);
      args.push_back(scalar_text(v));
    }
  }
  return args;
}

std::vector<std::string> expand_config_files(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> files;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      files.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      files.push_back(args[i].substr(9));
    } else {
      out.push_back(args[i]);
    }
  }
  if (files.empty()) return out;

  auto given = [&](const std::string& key) {
    return std::any_of(out.begin(), out.end(), [&](const std::string& a) {
      return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
    });
  };
  std::vector<std::string> extra;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kParse, "cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kParse, path + ":" + std::to_string(lineno) + ": expected key = value");
      }
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (given(key)) continue;
      if (value == "true") {
        extra.push_back("--" + key);
      } else if (value != "false") {
        extra.push_back("--" + key);
        extra.push_back(value);
      }
    }
  }
  // The subcommand is the first argument after the program name.
  std::size_t at = std::min<std::size_t>(2, out.size());
  out.insert(out.begin() + static_cast<long>(at), extra.begin(), extra.end());
  return out;
}

}  // namespace rydtoff::cli
