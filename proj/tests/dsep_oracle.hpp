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

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "pregtte/dag.hpp"

namespace pregtte::testing {

/// Independent d-separation check: enumerate every simple path in the
/// skeleton and test each for blocking with the textbook rules.
inline bool brute_force_dsep(const Dag& g, const std::string& x, const std::string& y, const NodeSet& z) {
  const NodeSet anc_z = g.ancestors(z);
  std::vector<std::string> path{x};
  std::set<std::string> on_path{x};
  std::function<bool(const std::string&)> walk = [&](const std::string& v) -> bool {
    if (v == y) {
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const auto& a = path[i - 1];
        const auto& m = path[i];
        const auto& b = path[i + 1];
        const bool collider = g.has_edge(a, m) && g.has_edge(b, m);
        if (collider ? !anc_z.count(m) : z.count(m) > 0) return false;
      }
      return true;
    }
    std::set<std::string> nbrs;
    for (const auto& [f, t] : g.edges) {
      if (f == v) nbrs.insert(t);
      if (t == v) nbrs.insert(f);
    }
    for (const auto& n : nbrs) {
      if (on_path.count(n)) continue;
      path.push_back(n);
      on_path.insert(n);
      const bool open = walk(n);
      path.pop_back();
      on_path.erase(n);
      if (open) return true;
    }
    return false;
  };
  return !walk(x);
}

inline std::vector<NodeSet> subsets(const std::vector<std::string>& items) {
  std::vector<NodeSet> out;
  for (unsigned mask = 0; mask < (1u << items.size()); ++mask) {
    NodeSet s;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (mask & (1u << i)) s.insert(items[i]);
    out.push_back(s);
  }
  return out;
}

}  // namespace pregtte::testing
