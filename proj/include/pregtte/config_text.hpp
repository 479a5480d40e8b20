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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pregtte {

/// One `key = value` line of a structured text file.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Line-oriented `key = value` document shared by world configs, experiment
/// configs and protocol files. `#` starts a comment. Keys are unique.
///
/// Lookups record which keys were consumed so callers can reject unknown keys
/// with a line diagnostic via `reject_unused()`.
class ConfigText {
 public:
  static ConfigText parse(std::string_view text, std::string source);
  static ConfigText load(const std::string& path);

  const std::string& source() const { return source_; }
  const std::vector<ConfigEntry>& entries() const { return entries_; }

  bool has(std::string_view key) const;
  const ConfigEntry* find(std::string_view key) const;

  std::optional<std::string> get_string(std::string_view key) const;
  std::optional<double> get_real(std::string_view key) const;
  std::optional<std::int64_t> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;
  /// Comma-separated list; empty items are dropped.
  std::optional<std::vector<std::string>> get_list(std::string_view key) const;

  /// Throws SchemaError naming the first key that no lookup consumed.
  void reject_unused() const;

  [[noreturn]] void fail(const ConfigEntry& entry, const std::string& what) const;

 private:
  std::string source_;
  std::vector<ConfigEntry> entries_;
  mutable std::vector<bool> used_;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace pregtte
