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

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qcomb/choi.hpp"
#include "qcomb/comb.hpp"
#include "qcomb/link.hpp"

namespace qcomb {

inline constexpr double kPostSelectionFloor = 1e-12;

/// Boundary conditions at times t_0..t_N for a system of dimension `dim`:
/// a preparation psi0, an intermediate pair (psi_i prepared after, phi_i
/// found before) at each t_1..t_{N-1}, and a final post-selection phiN.
struct MultiTimeState {
  std::size_t dim = 2;
  Vec psi0;
  std::vector<std::pair<Vec, Vec>> middle;  // (psi_i, phi_i)
  Vec phiN;

  std::size_t steps() const noexcept { return middle.size() + 1; }
};

/// Labels for the N measured intervals: the measurement maps a_k -> b_{k+1}.
inline std::string time_in_label(std::size_t k) { return "a" + std::to_string(k); }
inline std::string time_out_label(std::size_t k) { return "b" + std::to_string(k); }

/// Teeth of the measurement: (a_k -> b_{k+1}), k = 0..N-1.
inline std::vector<Tooth> measurement_teeth(std::size_t n, std::size_t dim) {
  std::vector<Tooth> t;
  for (std::size_t k = 0; k < n; ++k) {
    t.push_back({SpaceTuple{{time_in_label(k), dim}},
                 SpaceTuple{{time_out_label(k + 1), dim}}});
  }
  return t;
}

/// Teeth of a state comb: (- -> a_0), (b_k -> a_k), (b_N -> -).
inline std::vector<Tooth> state_teeth(std::size_t n, std::size_t dim) {
  std::vector<Tooth> t;
  t.push_back({SpaceTuple{}, SpaceTuple{{time_in_label(0), dim}}});
  for (std::size_t k = 1; k < n; ++k) {
    t.push_back({SpaceTuple{{time_out_label(k), dim}},
                 SpaceTuple{{time_in_label(k), dim}}});
  }
  t.push_back({SpaceTuple{{time_out_label(n), dim}}, SpaceTuple{}});
  return t;
}

/// An instrument whose outcome i has multipartite Kraus operators mapping
/// a_0 (x) ... (x) a_{N-1} to b_1 (x) ... (x) b_N.
struct MultiTimeMeasurement {
  std::size_t dim = 2;
  std::size_t steps = 1;
  std::vector<std::string> labels;
  std::vector<std::vector<Mat>> kraus;

  SpaceTuple inputs() const {
    std::vector<Space> s;
    for (std::size_t k = 0; k < steps; ++k) s.push_back({time_in_label(k), dim});
    return SpaceTuple(std::move(s));
  }
  SpaceTuple outputs() const {
    std::vector<Space> s;
    for (std::size_t k = 1; k <= steps; ++k) s.push_back({time_out_label(k), dim});
    return SpaceTuple(std::move(s));
  }

  /// R_i = sum_j |K_j>><<K_j| on outputs (x) inputs.
  Operator element(std::size_t i) const {
    return choi_of_kraus(kraus.at(i), inputs(), outputs()).choi();
  }
};

namespace detail {

inline Vec normalized(const Vec& v, const char* what) {
  const double n = v.norm();
  if (std::abs(n - 1.0) > 1e-9) {
    throw InvalidArgument(std::string(what) + " is not normalized");
  }
  return v;
}

}  // namespace detail

/// S = S_0 (x) S_1 (x) ... (x) S_N with S_0 = |psi0><psi0| on a_0,
/// S_i = |psi_i><psi_i| on a_i (x) |phi_i*><phi_i*| on b_i, and
/// S_N = |phiN*><phiN*| on b_N.
inline Comb state_comb(const MultiTimeState& s) {
  const std::size_t n = s.steps();
  const auto d = static_cast<Eigen::Index>(s.dim);
  auto proj = [&](const std::string& label, const Vec& v) {
    if (v.size() != d) throw ShapeMismatch("vector has wrong dimension");
    return Operator(SpaceTuple{{label, s.dim}}, v * v.adjoint());
  };
  Operator op = proj(time_in_label(0), detail::normalized(s.psi0, "psi0"));
  for (std::size_t k = 1; k < n; ++k) {
    const auto& [psi, phi] = s.middle[k - 1];
    op = tensor(op, proj(time_out_label(k), detail::normalized(phi, "phi").conjugate()));
    op = tensor(op, proj(time_in_label(k), detail::normalized(psi, "psi")));
  }
  op = tensor(op, proj(time_out_label(n), detail::normalized(s.phiN, "phiN").conjugate()));
  return Comb(state_teeth(n, s.dim), std::move(op), CombKind::Probabilistic);
}

/// p(i|S) = (S * R_i) / sum_j (S * R_j).
inline std::vector<double> history_probabilities(const MultiTimeMeasurement& m,
                                                 const MultiTimeState& s) {
  if (m.steps != s.steps() || m.dim != s.dim) {
    throw SpaceMismatch("measurement and state have different time structure");
  }
  const Comb sc = state_comb(s);
  std::vector<double> w;
  double z = 0.0;
  for (std::size_t i = 0; i < m.kraus.size(); ++i) {
    w.push_back(link(sc.op(), m.element(i)).value().real());
    z += w.back();
  }
  if (z <= kPostSelectionFloor) {
    throw PostSelectionImpossible("all histories have vanishing weight");
  }
  for (auto& x : w) x /= z;
  return w;
}

inline double history_probability(const MultiTimeMeasurement& m, const MultiTimeState& s,
                                  std::size_t i) {
  return history_probabilities(m, s).at(i);
}

/// Outcomes +2, -2, 0 of sigma_x(t_1) - sigma_x(t_2) for a qubit measured at
/// two times; the outcome-0 Kraus operator keeps the two equal-value branches
/// coherent.
inline MultiTimeMeasurement sigma_x_difference_instrument() {
  const double h = 1.0 / std::sqrt(2.0);
  Vec plus(2), minus(2);
  plus << h, h;
  minus << h, -h;
  const Mat pp = plus * plus.adjoint();
  const Mat pm = minus * minus.adjoint();
  auto kron = [](const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      }
    }
    return out;
  };
  MultiTimeMeasurement m;
  m.dim = 2;
  m.steps = 2;
  m.labels = {"+2", "-2", "0"};
  m.kraus = {{kron(pp, pm)}, {kron(pm, pp)}, {kron(pp, pp) + kron(pm, pm)}};
  return m;
}

/// A family of probabilistic combs summing to a deterministic one.
struct GeneralizedInstrument {
  std::vector<Tooth> teeth;
  std::vector<Operator> elements;

  Operator total() const {
    const SpaceTuple s = comb_spaces(teeth);
    Operator t(s, Mat::Zero(s.total_dim(), s.total_dim()));
    for (const auto& e : elements) t += e;
    return t;
  }
};

inline bool validate_instrument(const GeneralizedInstrument& ins, double tol = kCombTol) {
  for (const auto& e : ins.elements) {
    if (!is_psd(e, tol)) return false;
  }
  return validate_deterministic(ins.total(), ins.teeth, tol).ok;
}

/// Embeds one Kraus operator (mapping the joined inputs of `teeth` to the
/// joined outputs) into an instrument {R, S - R}, R = c |K>><<K|.
inline GeneralizedInstrument embed_kraus(const Mat& k, const std::vector<Tooth>& teeth,
                                         double tol = 1e-7, std::size_t max_iter = 5000) {
  SpaceTuple ins, outs;
  for (const auto& t : teeth) {
    ins = concat(ins, t.in);
    outs = concat(outs, t.out);
  }
  if (k.norm() == 0.0) throw InvalidArgument("Kraus operator is zero");
  Operator r = double_ket(k, ins, outs).projector();
  double scale = static_cast<double>(outs.total_dim()) * k.squaredNorm();
  r *= cplx(1.0 / scale, 0.0);
  auto f = probabilistic_feasibility(r, teeth, tol, max_iter);
  if (!f.feasible) {
    throw FeasibilitySolverFailure("no deterministic comb found above the rescaled element");
  }
  GeneralizedInstrument out{teeth, {}};
  out.elements.push_back(align(r, comb_spaces(teeth)));
  out.elements.push_back(f.witness - r);
  return out;
}

}  // namespace qcomb
