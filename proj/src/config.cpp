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


#include "gaztrack/config.hpp"

#include "gaztrack/error.hpp"
#include "gaztrack/io.hpp"

#include <cstdlib>
#include <set>

namespace gaztrack {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve(fs::path const& p, fs::path const& base) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

[[noreturn]] void bad(std::string const& key, std::string const& why) {
  throw Error(ErrorCode::kInvalidArgument, "config '" + key + "': " + why, {{"key", key}});
}

template <typename T>
T parse_number(std::string const& key, std::string const& text) {
  try {
    std::size_t used = 0;
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<T>(std::stod(text, &used));
    } else if constexpr (std::is_signed_v<T>) {
      value = static_cast<T>(std::stoll(text, &used));
    } else {
      if (!text.empty() && text[0] == '-') bad(key, "must not be negative");
      value = static_cast<T>(std::stoull(text, &used));
    }
    if (used != text.size()) bad(key, "not a number: '" + text + "'");
    return value;
  } catch (std::logic_error const&) {
    bad(key, "not a number: '" + text + "'");
  }
}

template <typename T>
T json_number(json const& j, std::string const& key) {
  if (!j.is_number()) bad(key, "must be a number");
  if constexpr (std::is_unsigned_v<T>) {
    if (!j.is_number_unsigned()) bad(key, "must be a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) bad(key, "must be an integer");
  }
  return j.get<T>();
}

std::string json_string(json const& j, std::string const& key) {
  if (!j.is_string()) bad(key, "must be a string");
  return j.get<std::string>();
}

}  // namespace

void ServiceConfig::validate() const {
  if (k < 2) bad("k", "must be at least 2");
  if (!(alpha > 0)) bad("alpha", "must be positive");
  if (min_df < 1) bad("min_df", "must be at least 1");
  if (port < 0 || port > 65535) bad("port", "out of range");
  if (host.empty()) bad("host", "must not be empty");
  if (data_dir.empty()) bad("data_dir", "must not be empty");
}

json ServiceConfig::to_json() const {
  return {{"host", host},
          {"port", port},
          {"data_dir", data_dir.string()},
          {"rules", rules_path ? json(rules_path->string()) : json(nullptr)},
          {"seed", seed},
          {"k", k},
          {"alpha", alpha},
          {"min_df", min_df},
          {"cors_origin", cors_origin},
          {"gat_baseline", gat_baseline ? json(gat_baseline->string()) : json(nullptr)}};
}

std::optional<std::string> process_env(char const* name) {
  if (char const* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

void apply_config_json(ServiceConfig& c, json const& j, fs::path const& base_dir) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  }
  static std::set<std::string> const kKeys = {"host",   "port",        "data_dir", "rules",
                                              "seed",   "k",           "alpha",    "min_df",
                                              "cors_origin", "gat_baseline", "xml", "gat_columns",
                                              "access_log"};
  for (auto const& [key, value] : j.items()) {
    if (!kKeys.contains(key)) bad(key, "unknown key");
    if (value.is_null()) continue;
    if (key == "host") c.host = json_string(value, key);
    else if (key == "port") c.port = json_number<int>(value, key);
    else if (key == "data_dir") c.data_dir = resolve(json_string(value, key), base_dir);
    else if (key == "rules") c.rules_path = resolve(json_string(value, key), base_dir);
    else if (key == "seed") c.seed = json_number<std::uint64_t>(value, key);
    else if (key == "k") c.k = json_number<std::size_t>(value, key);
    else if (key == "alpha") c.alpha = json_number<double>(value, key);
    else if (key == "min_df") c.min_df = json_number<std::size_t>(value, key);
    else if (key == "cors_origin") c.cors_origin = json_string(value, key);
    else if (key == "gat_baseline") c.gat_baseline = resolve(json_string(value, key), base_dir);
    else if (key == "access_log") {
      if (!value.is_boolean()) bad(key, "must be true or false");
      c.access_log = value.get<bool>();
    }
    else if (key == "xml") c.xml = XmlMapping::from_json(value);
    else if (key == "gat_columns") c.gat_columns = GatColumns::from_json(value);
  }
}

ServiceConfig load_config(std::optional<fs::path> const& path, EnvLookup const& env) {
  ServiceConfig c;
  if (path) {
    json j;
    try {
      j = json::parse(read_file(*path));
    } catch (json::parse_error const& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config " + path->string() + " is not valid JSON: " + e.what(),
                  {{"path", path->string()}});
    }
    apply_config_json(c, j, path->parent_path());
  }

  if (auto v = env("GAZTRACK_HOST")) c.host = *v;
  if (auto v = env("GAZTRACK_PORT")) c.port = parse_number<int>("GAZTRACK_PORT", *v);
  if (auto v = env("GAZTRACK_DATA_DIR")) c.data_dir = *v;
  if (auto v = env("GAZTRACK_RULES")) c.rules_path = fs::path(*v);
  if (auto v = env("GAZTRACK_SEED")) c.seed = parse_number<std::uint64_t>("GAZTRACK_SEED", *v);
  if (auto v = env("GAZTRACK_K")) c.k = parse_number<std::size_t>("GAZTRACK_K", *v);
  if (auto v = env("GAZTRACK_ALPHA")) c.alpha = parse_number<double>("GAZTRACK_ALPHA", *v);
  if (auto v = env("GAZTRACK_MIN_DF")) c.min_df = parse_number<std::size_t>("GAZTRACK_MIN_DF", *v);
  if (auto v = env("GAZTRACK_CORS_ORIGIN")) c.cors_origin = *v;
  if (auto v = env("GAZTRACK_GAT_BASELINE")) c.gat_baseline = fs::path(*v);
  c.validate();
  return c;
}

}  // namespace gaztrack
