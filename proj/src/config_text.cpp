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

#include "pregtte/config_text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pregtte/errors.hpp"

namespace pregtte {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    auto item = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

ConfigText ConfigText::parse(std::string_view text, std::string source) {
  ConfigText doc;
  doc.source_ = std::move(source);
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = trim(raw);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SchemaError(doc.source_, line_no, "", "expected 'key = value'");
    }
    ConfigEntry entry{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
    if (entry.key.empty()) throw SchemaError(doc.source_, line_no, "", "empty key");
    for (const auto& e : doc.entries_) {
      if (e.key == entry.key) {
        throw SchemaError(doc.source_, line_no, entry.key,
                          "duplicate key (first defined on line " + std::to_string(e.line) + ")");
      }
    }
    doc.entries_.push_back(std::move(entry));
  }
  doc.used_.assign(doc.entries_.size(), false);
  return doc;
}

ConfigText ConfigText::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const ConfigEntry* ConfigText::find(std::string_view key) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].key == key) {
      used_[i] = true;
      return &entries_[i];
    }
  }
  return nullptr;
}

bool ConfigText::has(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.key == key) return true;
  return false;
}

void ConfigText::fail(const ConfigEntry& entry, const std::string& what) const {
  throw SchemaError(source_, entry.line, entry.key, what);
}

std::optional<std::string> ConfigText::get_string(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> ConfigText::get_real(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  double v = 0;
  const auto* first = e->value.data();
  const auto* last = first + e->value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(*e, "expected a real number, got '" + e->value + "'");
  return v;
}

std::optional<std::int64_t> ConfigText::get_int(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  std::int64_t v = 0;
  const auto* first = e->value.data();
  const auto* last = first + e->value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(*e, "expected an integer, got '" + e->value + "'");
  return v;
}

std::optional<bool> ConfigText::get_bool(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
  if (e->value == "false" || e->value == "no" || e->value == "0") return false;
  fail(*e, "expected true/false, got '" + e->value + "'");
}

std::optional<std::vector<std::string>> ConfigText::get_list(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return split(e->value, ',');
}

void ConfigText::reject_unused() const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!used_[i]) throw SchemaError(source_, entries_[i].line, entries_[i].key, "unknown key");
  }
}

}  // namespace pregtte
