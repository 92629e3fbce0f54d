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

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace rydtoff::cli {

// Options of one subcommand, registered so that the parsed values can be
// written back out as a RunConfig and replayed as command-line flags.
class RunConfig {
 public:
  RunConfig(CLI::App* app, std::string command) : app_(app), command_(std::move(command)) {}

  template <class T>
  CLI::Option* option(const std::string& name, T& var, const std::string& desc) {
    getters_.emplace_back(name, [&var] { return nlohmann::json(var); });
    return app_->add_option("--" + name, var, desc)->capture_default_str();
  }

  template <class T>
  CLI::Option* list(const std::string& name, std::vector<T>& var, const std::string& desc) {
    getters_.emplace_back(name, [&var] { return nlohmann::json(var); });
    return app_->add_option("--" + name, var, desc)->delimiter(',')->capture_default_str();
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
    getters_.emplace_back(name, [&var] { return nlohmann::json(var); });
    return app_->add_flag("--" + name, var, desc);
  }

  CLI::App* app() const { return app_; }
  const std::string& command() const { return command_; }

  // {"command": ..., "options": {name: value}} with every registered option.
  nlohmann::json to_json() const;

 private:
  CLI::App* app_;
  std::string command_;
  std::vector<std::pair<std::string, std::function<nlohmann::json()>>> getters_;
};

// Flags that reproduce a RunConfig JSON object: command name first.
std::vector<std::string> replay_arguments(const nlohmann::json& config);

// Splices "key = value" lines from --config files into the argument list,
// right after the subcommand, unless the key is already given explicitly.
std::vector<std::string> expand_config_files(const std::vector<std::string>& args);

}  // namespace rydtoff::cli
