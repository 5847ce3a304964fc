// Copyright 2026 The gaztrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef GAZTRACK_CONFIG_HPP
#define GAZTRACK_CONFIG_HPP

#include "gaztrack/document.hpp"
#include "gaztrack/gat.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace gaztrack {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "gaztrack-data";
  std::optional<std::filesystem::path> rules_path;  // demo rules when unset
  std::uint64_t seed = 42;
  std::size_t k = 10;
  double alpha = 1.0;
  std::size_t min_df = 2;
  std::string cors_origin = "*";
  /// GAT CSV imported into an empty store on startup.
  std::optional<std::filesystem::path> gat_baseline;
  bool access_log = true;  // one stderr line per request
  XmlMapping xml;
  GatColumns gat_columns;

  /// Throws InvalidArgument: k >= 2, alpha > 0, min_df >= 1, 0 <= port < 65536.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Looks up an environment variable; injectable for tests.
using EnvLookup = std::function<std::optional<std::string>(char const*)>;
std::optional<std::string> process_env(char const* name);

/// Defaults, then the JSON file at `path` (relative paths inside it are
/// resolved against its directory), then GAZTRACK_* variables:
/// HOST, PORT, DATA_DIR, RULES, SEED, K, ALPHA, MIN_DF, CORS_ORIGIN,
/// GAT_BASELINE. Unknown file keys are rejected.
ServiceConfig load_config(std::optional<std::filesystem::path> const& path,
                          EnvLookup const& env = process_env);

/// Applies a JSON object of overrides on top of `base`, with relative paths
/// resolved against `base_dir`.
void apply_config_json(ServiceConfig& config, nlohmann::json const& j,
                       std::filesystem::path const& base_dir);

}  // namespace gaztrack

#endif  // GAZTRACK_CONFIG_HPP
