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

#include "pregtte/dag.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>

#include "pregtte/config_text.hpp"
#include "pregtte/errors.hpp"

namespace pregtte {

void Dag::add_edge(const std::string& from, const std::string& to) {
  nodes.insert(from);
  nodes.insert(to);
  edges.emplace(from, to);
}

bool Dag::has_edge(const std::string& from, const std::string& to) const { return edges.contains({from, to}); }

NodeSet Dag::parents(const std::string& v) const {
  NodeSet out;
  for (const auto& [a, b] : edges)
    if (b == v) out.insert(a);
  return out;
}

NodeSet Dag::children(const std::string& v) const {
  NodeSet out;
  for (const auto& [a, b] : edges)
    if (a == v) out.insert(b);
  return out;
}

NodeSet Dag::descendants(const NodeSet& of) const {
  NodeSet seen = of;
  std::deque<std::string> queue(of.begin(), of.end());
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (const auto& c : children(v))
      if (seen.insert(c).second) queue.push_back(c);
  }
  return seen;
}

NodeSet Dag::ancestors(const NodeSet& of) const {
  NodeSet seen = of;
  std::deque<std::string> queue(of.begin(), of.end());
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (const auto& p : parents(v))
      if (seen.insert(p).second) queue.push_back(p);
  }
  return seen;
}

bool Dag::is_acyclic() const {
  std::map<std::string, int> indeg;
  for (const auto& v : nodes) indeg[v] = 0;
  for (const auto& [a, b] : edges) ++indeg[b];
  std::deque<std::string> ready;
  for (const auto& [v, d] : indeg)
    if (d == 0) ready.push_back(v);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto v = ready.front();
    ready.pop_front();
    ++visited;
    for (const auto& c : children(v))
      if (--indeg[c] == 0) ready.push_back(c);
  }
  return visited == nodes.size();
}

void Dag::require_nodes(const NodeSet& labels) const {
  for (const auto& l : labels)
    if (!nodes.contains(l)) throw StructuralError("unknown node '" + l + "'");
}

Dag Dag::without_outgoing(const NodeSet& from) const {
  Dag g = *this;
  std::erase_if(g.edges, [&](const auto& e) { return from.contains(e.first); });
  return g;
}

bool d_separated(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z) {
  dag.require_nodes(x);
  dag.require_nodes(y);
  dag.require_nodes(z);
  for (const auto& v : x)
    if (y.contains(v) || z.contains(v)) throw PreconditionError("d_separated: x, y and z must be disjoint");
  for (const auto& v : y)
    if (z.contains(v)) throw PreconditionError("d_separated: x, y and z must be disjoint");

  const NodeSet z_ancestors = dag.ancestors(z);
  enum Dir { Up, Down };  // Up: arrived from a child; Down: arrived from a parent.
  std::set<std::pair<std::string, Dir>> visited;
  std::deque<std::pair<std::string, Dir>> queue;
  for (const auto& v : x) queue.emplace_back(v, Up);
  while (!queue.empty()) {
    auto [v, dir] = queue.front();
    queue.pop_front();
    if (!visited.insert({v, dir}).second) continue;
    const bool conditioned = z.contains(v);
    if (!conditioned && y.contains(v)) return false;
    if (dir == Up && !conditioned) {
      for (const auto& p : dag.parents(v)) queue.emplace_back(p, Up);
      for (const auto& c : dag.children(v)) queue.emplace_back(c, Down);
    } else if (dir == Down) {
      if (!conditioned)
        for (const auto& c : dag.children(v)) queue.emplace_back(c, Down);
      if (z_ancestors.contains(v))
        for (const auto& p : dag.parents(v)) queue.emplace_back(p, Up);
    }
  }
  return true;
}

namespace {

bool path_open(const Dag& dag, const std::vector<std::string>& path, const NodeSet& z, const NodeSet& z_anc,
               bool* through_conditioned_collider, const NodeSet& prefer) {
  bool via = false;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const auto& v = path[i];
    const bool collider = dag.has_edge(path[i - 1], v) && dag.has_edge(path[i + 1], v);
    if (collider) {
      if (!z_anc.contains(v)) return false;
      if (prefer.contains(v)) via = true;
    } else if (z.contains(v)) {
      return false;
    }
  }
  if (through_conditioned_collider) *through_conditioned_collider = via;
  return true;
}

std::vector<std::vector<std::string>> open_paths(const Dag& dag, const std::string& x, const std::string& y,
                                                 const NodeSet& z, const NodeSet& prefer, bool only_preferred) {
  const NodeSet z_anc = dag.ancestors(z);
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> path{x};
  NodeSet on_path{x};
  std::function<void(const std::string&)> walk = [&](const std::string& v) {
    if (v == y) {
      bool via = false;
      if (path_open(dag, path, z, z_anc, &via, prefer) && (!only_preferred || via)) out.push_back(path);
      return;
    }
    NodeSet nbrs = dag.parents(v);
    for (const auto& c : dag.children(v)) nbrs.insert(c);
    for (const auto& n : nbrs) {
      if (on_path.contains(n)) continue;
      path.push_back(n);
      on_path.insert(n);
      walk(n);
      on_path.erase(n);
      path.pop_back();
    }
  };
  walk(x);
  return out;
}

std::optional<std::vector<std::string>> best_path(std::vector<std::vector<std::string>> paths, const NodeSet& prefer) {
  if (paths.empty()) return std::nullopt;
  auto score = [&](const std::vector<std::string>& p) {
    const bool via = std::any_of(p.begin() + 1, p.end() - 1, [&](const auto& v) { return prefer.contains(v); });
    return std::tuple(!via, p.size(), p);
  };
  return *std::min_element(paths.begin(), paths.end(), [&](const auto& a, const auto& b) { return score(a) < score(b); });
}

}  // namespace

std::optional<std::vector<std::string>> find_open_path(const Dag& dag, const std::string& x, const std::string& y,
                                                       const NodeSet& z, const NodeSet& prefer_through) {
  dag.require_nodes({x, y});
  return best_path(open_paths(dag, x, y, z, prefer_through, false), prefer_through);
}

std::string format_path(const Dag& dag, const std::vector<std::string>& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += dag.has_edge(path[i - 1], path[i]) ? " -> " : " <- ";
    out += path[i];
  }
  return out;
}

std::string_view to_string(Estimand e) {
  switch (e) {
    case Estimand::Early: return "EARLY";
    case Estimand::Late: return "LATE";
    case Estimand::Joint: return "JOINT";
  }
  return "?";
}

Estimand parse_estimand(std::string_view s) {
  if (s == "EARLY") return Estimand::Early;
  if (s == "LATE") return Estimand::Late;
  if (s == "JOINT") return Estimand::Joint;
  throw PreconditionError("unknown estimand '" + std::string(s) + "'");
}

std::vector<std::string> treatments_of(Estimand e) {
  switch (e) {
    case Estimand::Early: return {"A0"};
    case Estimand::Late: return {"A1"};
    case Estimand::Joint: return {"A0", "A1"};
  }
  return {};
}

namespace {

struct StepFailure {
  std::vector<std::string> path;
  Dag graph;
};

// Sequential backdoor check of one adjustment set. A covariate (including an
// earlier treatment) is unusable when it reaches Y through an open path that
// runs through a conditioned selection collider: conditioning on selection
// ties it to the unmeasured causes of selection.
std::optional<StepFailure> check_adjustment(const Dag& dag, const std::vector<std::string>& treatments,
                                            const NodeSet& adjustment) {
  const std::string outcome = "Y";
  for (std::size_t j = 0; j < treatments.size(); ++j) {
    const auto& t = treatments[j];
    Dag g = dag.without_outgoing({t});
    for (std::size_t k = j + 1; k < treatments.size(); ++k)
      std::erase_if(g.edges, [&](const auto& e) { return e.second == treatments[k]; });

    NodeSet z = dag.always_conditioned;
    z.insert(adjustment.begin(), adjustment.end());
    NodeSet covariates = adjustment;
    for (std::size_t k = 0; k < j; ++k) {
      z.insert(treatments[k]);
      covariates.insert(treatments[k]);
    }

    if (!d_separated(g, {t}, {outcome}, z)) {
      auto p = best_path(open_paths(g, t, outcome, z, dag.always_conditioned, false), dag.always_conditioned);
      return StepFailure{p.value_or(std::vector<std::string>{t, outcome}), g};
    }
    for (const auto& v : covariates) {
      NodeSet z_minus = z;
      z_minus.erase(v);
      auto selection_paths = open_paths(g, v, outcome, z_minus, dag.always_conditioned, true);
      if (auto p = best_path(std::move(selection_paths), dag.always_conditioned)) {
        std::vector<std::string> full = *p;
        if (g.has_edge(v, t) || g.has_edge(t, v)) full.insert(full.begin(), t);
        return StepFailure{full, g};
      }
    }
  }
  return std::nullopt;
}

}  // namespace

IdentifiabilityVerdict check_identifiable(const Dag& dag, Estimand estimand) {
  if (!dag.is_acyclic()) throw StructuralError("graph contains a cycle");
  const auto treatments = treatments_of(estimand);
  NodeSet required(treatments.begin(), treatments.end());
  required.insert("Y");
  dag.require_nodes(required);

  const NodeSet desc = dag.descendants(NodeSet(treatments.begin(), treatments.end()));
  std::vector<std::string> candidates;
  for (const auto& v : dag.measured) {
    if (desc.contains(v) || v == "Y" || dag.always_conditioned.contains(v)) continue;
    candidates.push_back(v);
  }

  IdentifiabilityVerdict verdict;
  verdict.estimand = estimand;
  std::optional<StepFailure> last_failure;
  const std::size_t n = candidates.size();
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 0; m < (1u << n); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(),
                   [](auto a, auto b) { return std::popcount(a) < std::popcount(b); });
  for (const auto m : masks) {
    NodeSet w;
    for (std::size_t i = 0; i < n; ++i)
      if (m & (1u << i)) w.insert(candidates[i]);
    auto failure = check_adjustment(dag, treatments, w);
    if (!failure) {
      verdict.identifiable = true;
      verdict.witness = w;
      return verdict;
    }
    last_failure = std::move(failure);
  }
  verdict.open_path = last_failure->path;
  verdict.open_path_text = format_path(dag, last_failure->path);
  return verdict;
}

std::string_view to_string(CatalogGraph g) {
  switch (g) {
    case CatalogGraph::Fig3A: return "fig3a";
    case CatalogGraph::Fig3B: return "fig3b";
    case CatalogGraph::Fig3C: return "fig3c";
  }
  return "?";
}

std::map<CatalogGraph, Dag> graph_catalog() {
  Dag a;
  for (auto [f, t] : {std::pair{"A0", "A1"}, {"A0", "Y"}, {"A1", "Y"}, {"U", "S"}, {"U", "Y"}}) a.add_edge(f, t);
  a.measured = {"A0", "A1", "Y"};
  a.always_conditioned = {"S"};
  Dag b = a;
  b.add_edge("A0", "S");
  Dag c = b;
  c.add_edge("U", "A0");
  c.add_edge("U", "A1");
  return {{CatalogGraph::Fig3A, a}, {CatalogGraph::Fig3B, b}, {CatalogGraph::Fig3C, c}};
}

Dag catalog_graph(std::string_view name) {
  const auto cat = graph_catalog();
  for (const auto& [k, g] : cat)
    if (to_string(k) == name) return g;
  throw PreconditionError("unknown catalog graph '" + std::string(name) + "' (fig3a, fig3b, fig3c)");
}

Dag parse_dag(std::string_view text, const std::string& source) {
  Dag dag;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto parse_nodes = [&](const std::string& rest, NodeSet& into) {
    for (const auto& name : split(rest, ',')) {
      if (name.find_first_of(" \t<->") != std::string::npos) throw SchemaError(source, line_no, name, "bad node label");
      into.insert(name);
      dag.nodes.insert(name);
    }
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.starts_with("measured:")) {
      parse_nodes(line.substr(9), dag.measured);
    } else if (line.starts_with("conditioned:")) {
      parse_nodes(line.substr(12), dag.always_conditioned);
    } else if (line.starts_with("nodes:")) {
      NodeSet ignored;
      parse_nodes(line.substr(6), ignored);
    } else {
      const auto arrow = line.find("->");
      if (arrow == std::string::npos) throw SchemaError(source, line_no, "", "expected 'X -> Y', 'measured:' or 'conditioned:'");
      const auto from = trim(std::string_view(line).substr(0, arrow));
      const auto to = trim(std::string_view(line).substr(arrow + 2));
      if (from.empty() || to.empty() || from.find_first_of(" \t<>-") != std::string::npos ||
          to.find_first_of(" \t<>-") != std::string::npos)
        throw SchemaError(source, line_no, "", "malformed edge '" + line + "'");
      if (from == to) throw SchemaError(source, line_no, from, "self loop");
      dag.add_edge(from, to);
    }
  }
  if (dag.nodes.empty()) throw SchemaError(source, line_no, "", "graph has no nodes");
  return dag;
}

Dag load_dag(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dag(buf.str(), path);
}

}  // namespace pregtte
