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

// Small DAG engine: d-separation by reachability and a backdoor search under
// mandatory conditioning on selection nodes.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pregtte {

using NodeSet = std::set<std::string>;

struct Dag {
  NodeSet nodes;
  std::set<std::pair<std::string, std::string>> edges;
  NodeSet measured;
  /// Nodes every analysis conditions on (selection).
  NodeSet always_conditioned;

  void add_edge(const std::string& from, const std::string& to);
  bool has_edge(const std::string& from, const std::string& to) const;
  NodeSet parents(const std::string& v) const;
  NodeSet children(const std::string& v) const;
  NodeSet descendants(const NodeSet& of) const;  ///< includes `of`
  NodeSet ancestors(const NodeSet& of) const;    ///< includes `of`
  bool is_acyclic() const;
  /// Throws StructuralError when a label is not a node.
  void require_nodes(const NodeSet& labels) const;
  /// Copy without edges leaving any node of `from`.
  Dag without_outgoing(const NodeSet& from) const;
};

/// d-separation of x and y given z (Bayes-ball style reachability).
bool d_separated(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z);

/// An open path between x and y given z, if one exists (node sequence,
/// shortest by node count). Paths through conditioned colliders are
/// preferred when `prefer_through` is non-empty.
std::optional<std::vector<std::string>> find_open_path(const Dag& dag, const std::string& x, const std::string& y,
                                                       const NodeSet& z, const NodeSet& prefer_through = {});

/// Renders a path with edge directions, e.g. "A1 <- A0 -> S <- U -> Y".
std::string format_path(const Dag& dag, const std::vector<std::string>& path);

enum class Estimand { Early, Late, Joint };
std::string_view to_string(Estimand e);
Estimand parse_estimand(std::string_view s);
/// Treatment nodes in temporal order (A0, A1 or both).
std::vector<std::string> treatments_of(Estimand e);

struct IdentifiabilityVerdict {
  Estimand estimand = Estimand::Early;
  bool identifiable = false;
  /// Adjustment set drawn from the measured nodes when identifiable; the
  /// always-conditioned nodes apply in addition.
  std::optional<NodeSet> witness;
  std::optional<std::vector<std::string>> open_path;
  std::string open_path_text;
};

/// Searches subsets of the measured nodes for a sequential backdoor set for
/// the estimand's treatments. Throws StructuralError on cyclic graphs or
/// missing treatment/outcome nodes.
IdentifiabilityVerdict check_identifiable(const Dag& dag, Estimand estimand);

enum class CatalogGraph { Fig3A, Fig3B, Fig3C };
std::map<CatalogGraph, Dag> graph_catalog();
Dag catalog_graph(std::string_view name);  ///< "fig3a" | "fig3b" | "fig3c"
std::string_view to_string(CatalogGraph g);

/// Parses the edge-list format: `A0 -> S` lines plus `measured:` and
/// `conditioned:` headers. Throws SchemaError with a line diagnostic.
Dag parse_dag(std::string_view text, const std::string& source = "<dag>");
Dag load_dag(const std::string& path);

}  // namespace pregtte
