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

// JSON serialization.  Complex numbers are [re, im] pairs, matrices are
// row-major nested arrays, and every operator carries its ordered spaces.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcomb/comb.hpp"
#include "qcomb/multitime.hpp"
#include "qcomb/network.hpp"
#include "qcomb/realization.hpp"
#include "qcomb/tester.hpp"

namespace qcomb::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw ParseError(what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing key '") + key + "'");
  return j.at(key);
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) detail::fail("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Mat matrix_from_json(const json& j) {
  return detail::guarded([&] {
    if (!j.is_array()) detail::fail("matrix must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) {
        detail::fail("matrix rows have unequal length");
      }
      for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
    }
    return m;
  });
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

inline Vec vector_from_json(const json& j) {
  return detail::guarded([&] {
    if (!j.is_array()) detail::fail("vector must be an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
  });
}

inline json to_json(const Space& s) { return {{"label", s.label}, {"dim", s.dim}}; }

inline json to_json(const SpaceTuple& t) {
  json a = json::array();
  for (const auto& s : t) a.push_back(to_json(s));
  return a;
}

inline Space space_from_json(const json& j) {
  return detail::guarded([&] {
    const json& l = detail::field(j, "label");
    std::string label = l.is_string() ? l.get<std::string>() : l.dump();
    const auto dim = detail::field(j, "dim").get<long long>();
    if (dim < 1) throw DimMismatch("space '" + label + "' has dimension < 1");
    return Space{std::move(label), static_cast<std::size_t>(dim)};
  });
}

/// Accepts an array of spaces, a single space object, or null (empty).
inline SpaceTuple spaces_from_json(const json& j) {
  if (j.is_null()) return {};
  if (j.is_object()) return SpaceTuple{space_from_json(j)};
  if (!j.is_array()) detail::fail("spaces must be an array");
  std::vector<Space> s;
  for (const auto& e : j) s.push_back(space_from_json(e));
  return SpaceTuple(std::move(s));
}

inline json to_json(const Operator& op) {
  return {{"spaces", to_json(op.spaces())}, {"matrix", to_json(op.matrix())}};
}

inline Operator operator_from_json(const json& j) {
  return Operator(spaces_from_json(detail::field(j, "spaces")),
                  matrix_from_json(detail::field(j, "matrix")));
}

inline json to_json(const std::vector<Tooth>& teeth) {
  json a = json::array();
  for (const auto& t : teeth) a.push_back({{"in", to_json(t.in)}, {"out", to_json(t.out)}});
  return a;
}

inline std::vector<Tooth> teeth_from_json(const json& j) {
  if (!j.is_array()) detail::fail("teeth must be an array");
  std::vector<Tooth> t;
  for (const auto& e : j) {
    t.push_back({spaces_from_json(e.value("in", json())),
                 spaces_from_json(e.value("out", json()))});
  }
  return t;
}

inline json to_json(const Comb& c) {
  return {{"teeth", to_json(c.teeth())},
          {"kind", c.kind() == CombKind::Deterministic ? "deterministic" : "probabilistic"},
          {"operator", to_json(c.op())}};
}

inline Comb comb_from_json(const json& j) {
  return detail::guarded([&] {
    const std::string kind = j.value("kind", std::string("deterministic"));
    if (kind != "deterministic" && kind != "probabilistic") {
      detail::fail("unknown comb kind '" + kind + "'");
    }
    return Comb(teeth_from_json(detail::field(j, "teeth")),
                operator_from_json(detail::field(j, "operator")),
                kind == "deterministic" ? CombKind::Deterministic : CombKind::Probabilistic);
  });
}

/// Without "teeth" the elements form a POVM on a state over "spaces".
inline json to_json(const Tester& t) {
  json elems = json::array();
  for (const auto& e : t.elements) elems.push_back(to_json(e));
  return {{"elements", elems}, {"spaces", to_json(t.spaces())}, {"teeth", to_json(t.teeth)}};
}

inline Tester tester_from_json(const json& j) {
  return detail::guarded([&] {
    Tester t;
    if (j.contains("teeth")) {
      t.teeth = teeth_from_json(j.at("teeth"));
    } else {
      t.teeth = {{SpaceTuple{}, spaces_from_json(detail::field(j, "spaces"))}};
    }
    for (const auto& e : detail::field(j, "elements")) t.elements.push_back(operator_from_json(e));
    return t;
  });
}

inline json to_json(const IsometrySequence& s) {
  json steps = json::array();
  for (std::size_t k = 0; k < s.steps.size(); ++k) {
    steps.push_back({{"in", to_json(s.teeth[k].in)},
                     {"out", to_json(s.teeth[k].out)},
                     {"matrix", to_json(s.steps[k])}});
  }
  return {{"steps", steps},
          {"ancilla_dims", s.ancilla_dims},
          {"final_policy", s.final_policy == FinalPolicy::TraceOut ? "trace-out" : "measure"}};
}

inline IsometrySequence isometry_sequence_from_json(const json& j) {
  return detail::guarded([&] {
    IsometrySequence s;
    for (const auto& st : detail::field(j, "steps")) {
      s.teeth.push_back({spaces_from_json(st.value("in", json())),
                         spaces_from_json(st.value("out", json()))});
      s.steps.push_back(matrix_from_json(detail::field(st, "matrix")));
    }
    s.ancilla_dims = detail::field(j, "ancilla_dims").get<std::vector<std::size_t>>();
    s.final_policy = j.value("final_policy", std::string("trace-out")) == "measure"
                         ? FinalPolicy::Measure
                         : FinalPolicy::TraceOut;
    if (s.ancilla_dims.size() != s.steps.size() + 1) {
      detail::fail("ancilla_dims must have one more entry than steps");
    }
    return s;
  });
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse(const std::string& text) {
  return detail::guarded([&] { return json::parse(text); });
}

inline json load(const std::filesystem::path& p) { return parse(read_file(p)); }

inline void save(const std::filesystem::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) throw ParseError("cannot write '" + p.string() + "'");
  out << j.dump(2) << '\n';
}

/// Nodes are inline comb objects or paths relative to `base_dir`.
inline NetworkGraph graph_from_json(const json& j,
                                    const std::filesystem::path& base_dir = ".") {
  return detail::guarded([&] {
    NetworkGraph g;
    for (const auto& [id, node] : detail::field(j, "nodes").items()) {
      if (node.is_string()) {
        g.add_node(id, comb_from_json(load(base_dir / node.get<std::string>())));
      } else {
        g.add_node(id, comb_from_json(node));
      }
    }
    for (const auto& w : j.value("wires", json::array())) {
      const json& f = detail::field(w, "from");
      const json& t = detail::field(w, "to");
      g.add_wire({f.at(0).get<std::string>(), f.at(1).get<std::string>(),
                  t.at(0).get<std::string>(), t.at(1).get<std::string>()});
    }
    return g;
  });
}

inline json to_json(const NetworkGraph& g) {
  json nodes = json::object();
  for (const auto& [id, c] : g.nodes()) nodes[id] = to_json(c);
  json wires = json::array();
  for (const auto& w : g.wires()) {
    wires.push_back({{"from", {w.from_node, w.from_label}}, {"to", {w.to_node, w.to_label}}});
  }
  return {{"nodes", nodes}, {"wires", wires}};
}

inline json to_json(const MultiTimeState& s) {
  json middle = json::array();
  for (const auto& [psi, phi] : s.middle) {
    middle.push_back({{"psi", to_json(psi)}, {"phi", to_json(phi)}});
  }
  return {{"dim", s.dim}, {"psi0", to_json(s.psi0)}, {"middle", middle}, {"phiN", to_json(s.phiN)}};
}

inline MultiTimeState multitime_state_from_json(const json& j) {
  return detail::guarded([&] {
    MultiTimeState s;
    s.dim = j.value("dim", std::size_t{2});
    s.psi0 = vector_from_json(detail::field(j, "psi0"));
    for (const auto& m : j.value("middle", json::array())) {
      s.middle.emplace_back(vector_from_json(detail::field(m, "psi")),
                            vector_from_json(detail::field(m, "phi")));
    }
    s.phiN = vector_from_json(detail::field(j, "phiN"));
    return s;
  });
}

inline json to_json(const MultiTimeMeasurement& m) {
  json outcomes = json::array();
  for (std::size_t i = 0; i < m.kraus.size(); ++i) {
    json ks = json::array();
    for (const auto& k : m.kraus[i]) ks.push_back(to_json(k));
    outcomes.push_back({{"label", m.labels.at(i)}, {"kraus", ks}});
  }
  return {{"dim", m.dim}, {"steps", m.steps}, {"outcomes", outcomes}};
}

inline MultiTimeMeasurement multitime_measurement_from_json(const json& j) {
  return detail::guarded([&] {
    MultiTimeMeasurement m;
    m.dim = j.value("dim", std::size_t{2});
    m.steps = detail::field(j, "steps").get<std::size_t>();
    for (const auto& o : detail::field(j, "outcomes")) {
      m.labels.push_back(o.value("label", std::to_string(m.labels.size())));
      std::vector<Mat> ks;
      for (const auto& k : detail::field(o, "kraus")) ks.push_back(matrix_from_json(k));
      m.kraus.push_back(std::move(ks));
    }
    return m;
  });
}

inline json to_json(const GeneralizedInstrument& g) {
  json elems = json::array();
  for (const auto& e : g.elements) elems.push_back(to_json(e));
  return {{"type", "instrument"}, {"teeth", to_json(g.teeth)}, {"elements", elems}};
}

inline GeneralizedInstrument instrument_from_json(const json& j) {
  return detail::guarded([&] {
    GeneralizedInstrument g;
    g.teeth = teeth_from_json(detail::field(j, "teeth"));
    for (const auto& e : detail::field(j, "elements")) g.elements.push_back(operator_from_json(e));
    return g;
  });
}

}  // namespace qcomb::io
