// Copyright 2026 The qcomb Authors
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

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qcomb/comb.hpp"
#include "qcomb/link.hpp"

namespace qcomb {

struct Wire {
  std::string from_node;
  std::string from_label;  // an output label of from_node
  std::string to_node;
  std::string to_label;  // an input label of to_node
};

/// Circuit of comb-valued nodes.  Node labels are local to their node; a
/// compiled comb names every free space "node.label", and an internal wire
/// takes the name of its source end.
///
/// Causal order is tracked per tooth, so a wire may leave one tooth of a
/// comb and return into a later tooth of the same comb (filling a slot).
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(std::map<std::string, Comb> nodes, std::vector<Wire> wires)
      : nodes_(std::move(nodes)), wires_(std::move(wires)) {}

  void add_node(const std::string& id, Comb c) {
    if (!nodes_.emplace(id, std::move(c)).second) {
      throw WireError("duplicate node id '" + id + "'");
    }
  }
  void add_wire(Wire w) { wires_.push_back(std::move(w)); }

  const std::map<std::string, Comb>& nodes() const noexcept { return nodes_; }
  const std::vector<Wire>& wires() const noexcept { return wires_; }

  const Comb& node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw WireError("unknown node '" + id + "'");
    return it->second;
  }

 private:
  std::map<std::string, Comb> nodes_;
  std::vector<Wire> wires_;
};

inline std::string qualified(const std::string& node, const std::string& label) {
  return node + "." + label;
}

namespace detail {

struct ToothRef {
  std::string node;
  std::size_t tooth = 0;
  auto operator<=>(const ToothRef&) const = default;
};

/// Tooth of `c` whose `in` (or `out`) holds `label`.
inline std::optional<std::size_t> tooth_of(const Comb& c, const std::string& label,
                                           bool input) {
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto& side = input ? c.teeth()[k].in : c.teeth()[k].out;
    if (side.contains(label)) return k;
  }
  return std::nullopt;
}

inline std::size_t dim_of(const Comb& c, const std::string& label) {
  return c.op().spaces().at(label).dim;
}

/// Tooth-level dependency graph: tooth k -> k+1 inside every node, and the
/// source tooth -> target tooth of every wire.
struct ToothGraph {
  std::vector<ToothRef> vertices;
  std::map<ToothRef, std::set<ToothRef>> succ;
};

inline ToothGraph tooth_graph(const NetworkGraph& g) {
  ToothGraph tg;
  for (const auto& [id, c] : g.nodes()) {
    for (std::size_t k = 0; k < std::max<std::size_t>(c.size(), 1); ++k) {
      ToothRef r{id, k};
      tg.vertices.push_back(r);
      tg.succ[r];
      if (k + 1 < c.size()) tg.succ[r].insert({id, k + 1});
    }
  }
  for (const auto& w : g.wires()) {
    const auto& a = g.node(w.from_node);
    const auto& b = g.node(w.to_node);
    auto ka = tooth_of(a, w.from_label, false);
    auto kb = tooth_of(b, w.to_label, true);
    tg.succ[{w.from_node, *ka}].insert({w.to_node, *kb});
  }
  return tg;
}

/// Node ids along a cycle, first id repeated at the end.
inline std::vector<std::string> find_cycle(const ToothGraph& tg) {
  std::map<ToothRef, int> state;  // 0 new, 1 on stack, 2 done
  std::vector<ToothRef> stack;
  std::vector<ToothRef> cycle;
  std::function<bool(const ToothRef&)> dfs = [&](const ToothRef& v) {
    state[v] = 1;
    stack.push_back(v);
    for (const auto& w : tg.succ.at(v)) {
      if (state[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        cycle.push_back(w);
        return true;
      }
      if (state[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (const auto& v : tg.vertices) {
    if (state[v] == 0 && dfs(v)) break;
  }
  std::vector<std::string> path;
  for (const auto& r : cycle) {
    if (path.empty() || path.back() != r.node) path.push_back(r.node);
  }
  if (path.size() == 1) path.push_back(path.front());
  return path;
}

/// Kahn's algorithm, ties broken by (node id, tooth index).
inline std::vector<ToothRef> tooth_order(const ToothGraph& tg) {
  std::map<ToothRef, std::size_t> indeg;
  for (const auto& v : tg.vertices) indeg[v];
  for (const auto& [v, ws] : tg.succ) {
    for (const auto& w : ws) ++indeg[w];
  }
  std::priority_queue<ToothRef, std::vector<ToothRef>, std::greater<>> ready;
  for (const auto& [v, d] : indeg) {
    if (d == 0) ready.push(v);
  }
  std::vector<ToothRef> out;
  while (!ready.empty()) {
    ToothRef v = ready.top();
    ready.pop();
    out.push_back(v);
    for (const auto& w : tg.succ.at(v)) {
      if (--indeg[w] == 0) ready.push(w);
    }
  }
  if (out.size() != tg.vertices.size()) throw CycleFound(find_cycle(tg));
  return out;
}

}  // namespace detail

/// Checks wire endpoints, dimensions, fan-in/fan-out and acyclicity.
inline void validate_graph(const NetworkGraph& g) {
  std::set<std::pair<std::string, std::string>> used_out, used_in;
  for (const auto& w : g.wires()) {
    if (w.from_node == w.to_node) throw CycleFound({w.from_node, w.to_node});
    const Comb& a = g.node(w.from_node);
    const Comb& b = g.node(w.to_node);
    if (!detail::tooth_of(a, w.from_label, false)) {
      throw WireError("'" + w.from_label + "' is not an output of node '" +
                      w.from_node + "'");
    }
    if (!detail::tooth_of(b, w.to_label, true)) {
      throw WireError("'" + w.to_label + "' is not an input of node '" +
                      w.to_node + "'");
    }
    const auto da = detail::dim_of(a, w.from_label);
    const auto db = detail::dim_of(b, w.to_label);
    if (da != db) {
      throw WireError("wire " + qualified(w.from_node, w.from_label) + " -> " +
                      qualified(w.to_node, w.to_label) + " joins dims " +
                      std::to_string(da) + " and " + std::to_string(db));
    }
    if (!used_out.insert({w.from_node, w.from_label}).second) {
      throw WireError("output " + qualified(w.from_node, w.from_label) +
                      " feeds more than one wire");
    }
    if (!used_in.insert({w.to_node, w.to_label}).second) {
      throw WireError("input " + qualified(w.to_node, w.to_label) +
                      " is fed by more than one wire");
    }
  }
  auto tg = detail::tooth_graph(g);
  detail::tooth_order(tg);
}

/// Topological order of the nodes, by first appearance in the tooth order.
inline std::vector<std::string> sequential_order(const NetworkGraph& g) {
  validate_graph(g);
  auto order = detail::tooth_order(detail::tooth_graph(g));
  std::vector<std::string> out;
  for (const auto& r : order) {
    if (std::find(out.begin(), out.end(), r.node) == out.end()) out.push_back(r.node);
  }
  return out;
}

namespace detail {

/// Node operator with qualified labels and wire ends renamed to the source.
inline Operator wired_operator(const NetworkGraph& g, const std::string& id) {
  const Comb& c = g.node(id);
  std::map<std::string, std::string> ren;
  for (const auto& s : c.op().spaces()) ren[s.label] = qualified(id, s.label);
  for (const auto& w : g.wires()) {
    if (w.to_node == id) ren[w.to_label] = qualified(w.from_node, w.from_label);
  }
  return relabel(c.op(), ren);
}

inline SpaceTuple free_part(const NetworkGraph& g, const std::string& id,
                            const SpaceTuple& side, bool input) {
  std::vector<Space> out;
  for (const auto& s : side) {
    bool wired = false;
    for (const auto& w : g.wires()) {
      if (input ? (w.to_node == id && w.to_label == s.label)
                : (w.from_node == id && w.from_label == s.label)) {
        wired = true;
      }
    }
    if (!wired) out.push_back({qualified(id, s.label), s.dim});
  }
  return SpaceTuple(std::move(out));
}

}  // namespace detail

/// Compiles with the node operators linked in the given order (any
/// permutation of the node ids gives the same operator).
inline Comb compile(const NetworkGraph& g, const std::vector<std::string>& link_order) {
  validate_graph(g);
  auto order = detail::tooth_order(detail::tooth_graph(g));
  std::vector<Tooth> teeth;
  bool deterministic = true;
  for (const auto& r : order) {
    const Comb& c = g.node(r.node);
    if (c.kind() != CombKind::Deterministic) deterministic = false;
    if (c.size() == 0) continue;
    const Tooth& t = c.teeth()[r.tooth];
    Tooth ft{detail::free_part(g, r.node, t.in, true),
             detail::free_part(g, r.node, t.out, false)};
    if (ft.in.empty() && ft.out.empty()) continue;
    // A boundary with nothing free on one side carries no causal constraint.
    if (!teeth.empty() && (teeth.back().out.empty() || ft.in.empty())) {
      teeth.back().in = concat(teeth.back().in, ft.in);
      teeth.back().out = concat(teeth.back().out, ft.out);
    } else {
      teeth.push_back(std::move(ft));
    }
  }
  const std::set<std::string> listed(link_order.begin(), link_order.end());
  if (listed.size() != link_order.size() || listed.size() != g.nodes().size()) {
    throw InvalidArgument("link order must list every node once");
  }
  std::vector<Operator> ops;
  for (const auto& id : link_order) ops.push_back(detail::wired_operator(g, id));
  Operator op = link_chain(ops);
  op = align(op, comb_spaces(teeth));
  return Comb(std::move(teeth), std::move(op),
              deterministic ? CombKind::Deterministic : CombKind::Probabilistic);
}

inline Comb compile(const NetworkGraph& g) { return compile(g, sequential_order(g)); }

}  // namespace qcomb
