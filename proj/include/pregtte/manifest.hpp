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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pregtte {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kManifestFormat = "pregtte-manifest/1";

/// Provenance record written next to every output artifact.
///
/// `arguments` holds the command's options (output location excluded) so the
/// run can be replayed; `outputs` maps each written file name to its digest.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> arguments;
  std::string params_digest;
  std::string protocol_digest;
  std::vector<std::string> designs;
  std::uint64_t master_seed = 0;
  std::string tool_version;
  std::string created_utc;
  std::map<std::string, std::string> outputs;

  bool operator==(const RunManifest&) const = default;
};

std::string tool_version();
/// Current time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp_now();

/// Pretty-printed JSON with a fixed key order and a trailing newline.
std::string manifest_json(const RunManifest& manifest);
/// Throws SchemaError on malformed JSON, wrong format tag or missing fields.
RunManifest parse_manifest(std::string_view text, const std::string& source);

}  // namespace pregtte
