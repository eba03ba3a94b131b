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

// Writes the bundled example files.  Usage: qcomb_fixtures <dir>

#include <cmath>
#include <filesystem>
#include <iostream>

#include "qcomb/io.hpp"

using namespace qcomb;
using io::json;
namespace fs = std::filesystem;

namespace {

Space qubit(const std::string& l) { return {l, 2}; }

Operator bell(const std::string& out, const std::string& in) {
  return double_ket(Mat::Identity(2, 2), SpaceTuple{qubit(in)}, SpaceTuple{qubit(out)}).projector();
}

json comb_file(const Comb& c) {
  json j = io::to_json(c);
  j["type"] = "comb";
  return j;
}

Comb channel(const Mat& choi_matrix) {
  const SpaceTuple s{qubit("out"), qubit("in")};
  return Comb({{SpaceTuple{qubit("in")}, SpaceTuple{qubit("out")}}}, Operator(s, choi_matrix));
}

Comb unitary_channel(const Mat& u) {
  return Comb({{SpaceTuple{qubit("in")}, SpaceTuple{qubit("out")}}},
              choi_of_kraus({u}, SpaceTuple{qubit("in")}, SpaceTuple{qubit("out")}).choi());
}

std::vector<Tooth> two_teeth() {
  return {{SpaceTuple{qubit("0")}, SpaceTuple{qubit("1")}},
          {SpaceTuple{qubit("2")}, SpaceTuple{qubit("3")}}};
}

json wire(const std::string& a, const std::string& al, const std::string& b,
          const std::string& bl) {
  return {{"from", {a, al}}, {"to", {b, bl}}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: qcomb_fixtures <dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const json& j) { io::save(dir / name, j); };

  const auto teeth = two_teeth();
  put("j2.json", comb_file(Comb(teeth, normalized_identity_comb(teeth))));

  // a wire from the second input back to the first output
  Operator rev = tensor(bell("1", "2"), Operator::identity(SpaceTuple{qubit("3"), qubit("0")}));
  rev *= cplx(0.5);
  put("reversed_comb.json", comb_file(Comb(teeth, rev)));

  Mat sx(2, 2);
  sx << 0, 1, 1, 0;
  put("identity_channel.json", comb_file(unitary_channel(Mat::Identity(2, 2))));
  put("sigma_x_channel.json", comb_file(unitary_channel(sx)));
  const Mat id_choi = bell("out", "in").matrix();
  put("depolarizing_channel.json", comb_file(channel(0.5 * id_choi + 0.25 * Mat::Identity(4, 4))));

  put("chain_graph.json",
      {{"nodes", {{"A", "identity_channel.json"}, {"B", "sigma_x_channel.json"}}},
       {"wires", {wire("A", "out", "B", "in")}}});
  put("three_node_graph.json",
      {{"nodes",
        {{"A", "identity_channel.json"},
         {"B", "depolarizing_channel.json"},
         {"C", "sigma_x_channel.json"}}},
       {"wires", {wire("A", "out", "B", "in"), wire("B", "out", "C", "in")}}});
  put("slot_graph.json",
      {{"nodes", {{"M", "j2.json"}, {"C", "depolarizing_channel.json"}}},
       {"wires", {wire("M", "1", "C", "in"), wire("C", "out", "M", "2")}}});

  // {|I>><<I|/4, I/2 - |I>><<I|/4} on the qubit 1-comb
  const SpaceTuple ts{qubit("in"), qubit("out")};
  Operator b = align(bell("out", "in"), ts);
  b *= cplx(0.25);
  Operator rest = Operator::identity(ts);
  rest *= cplx(0.5);
  rest -= b;
  Tester bell_tester{tester_teeth({{SpaceTuple{qubit("in")}, SpaceTuple{qubit("out")}}}), {b, rest}};
  json bt = io::to_json(bell_tester);
  bt["type"] = "tester";
  put("bell_tester.json", bt);

  Mat zero = Mat::Zero(2, 2);
  zero(0, 0) = 1.0;
  Mat one = Mat::Zero(2, 2);
  one(1, 1) = 1.0;
  json st = io::to_json(Operator(SpaceTuple{qubit("q")}, zero));
  st["type"] = "operator";
  put("state_zero.json", st);
  json povm = {{"type", "tester"},
               {"spaces", io::to_json(SpaceTuple{qubit("B.out")})},
               {"elements",
                {io::to_json(Operator(SpaceTuple{qubit("B.out")}, zero)),
                 io::to_json(Operator(SpaceTuple{qubit("B.out")}, one))}}};
  put("povm_z_chain.json", povm);

  json ins = io::to_json(sigma_x_difference_instrument());
  ins["type"] = "multitime-measurement";
  put("sigma_x_instrument.json", ins);
  const double h = 1.0 / std::sqrt(2.0);
  Vec plus(2), minus(2);
  plus << h, h;
  minus << h, -h;
  MultiTimeState s;
  s.psi0 = plus;
  s.middle = {{minus, plus}};
  s.phiN = minus;
  json sj = io::to_json(s);
  sj["type"] = "multitime-state";
  put("sigma_x_state.json", sj);
  return 0;
}
