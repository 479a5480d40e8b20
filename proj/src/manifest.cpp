/*
 * Copyright 2026 The pregtte Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pregtte/manifest.hpp"

#include <chrono>
#include <ctime>

#include <nlohmann/json.hpp>

#include "pregtte/errors.hpp"

namespace pregtte {

using ordered_json = nlohmann::ordered_json;

std::string tool_version() { return PREGTTE_VERSION; }

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  ordered_json j;
  j["format"] = kManifestFormat;
  j["command"] = m.command;
  ordered_json args = ordered_json::object();
  for (const auto& [k, v] : m.arguments) args[k] = v;
  j["arguments"] = args;
  j["params_digest"] = m.params_digest;
  j["protocol_digest"] = m.protocol_digest;
  j["designs"] = m.designs;
  // Seeds are 64-bit; a decimal string survives JSON readers that use doubles.
  j["master_seed"] = std::to_string(m.master_seed);
  j["tool_version"] = m.tool_version;
  j["created_utc"] = m.created_utc;
  ordered_json outs = ordered_json::object();
  for (const auto& [k, v] : m.outputs) outs[k] = v;
  j["outputs"] = outs;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(std::string_view text, const std::string& source) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(source, 0, "", std::string("invalid JSON: ") + e.what());
  }
  auto field = [&](const char* key) -> const ordered_json& {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(source, 0, key, "missing field");
    return j.at(key);
  };
  try {
    if (field("format").get<std::string>() != kManifestFormat)
      throw SchemaError(source, 0, "format", std::string("expected '") + kManifestFormat + "'");
    RunManifest m;
    m.command = field("command").get<std::string>();
    m.arguments = field("arguments").get<std::map<std::string, std::string>>();
    m.params_digest = field("params_digest").get<std::string>();
    m.protocol_digest = field("protocol_digest").get<std::string>();
    m.designs = field("designs").get<std::vector<std::string>>();
    m.master_seed = std::stoull(field("master_seed").get<std::string>());
    m.tool_version = field("tool_version").get<std::string>();
    m.created_utc = field("created_utc").get<std::string>();
    m.outputs = field("outputs").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(source, 0, "", std::string("wrong field type: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw SchemaError(source, 0, "master_seed", "not an unsigned integer");
  } catch (const std::out_of_range&) {
    throw SchemaError(source, 0, "master_seed", "out of range");
  }
}

}  // namespace pregtte
