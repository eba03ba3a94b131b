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
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qcomb/link.hpp"
#include "qcomb/operator.hpp"

namespace qcomb {

inline constexpr double kCombTol = 1e-9;

/// One input/output slot of a comb.  Either side may be composite or empty.
struct Tooth {
  SpaceTuple in;
  SpaceTuple out;
};

enum class CombKind { Deterministic, Probabilistic };

/// in_0, out_0, in_1, out_1, ...
inline SpaceTuple comb_spaces(const std::vector<Tooth>& teeth) {
  SpaceTuple all;
  for (const auto& t : teeth) all = concat(concat(all, t.in), t.out);
  return all;
}

class Comb {
 public:
  Comb(std::vector<Tooth> teeth, Operator op,
       CombKind kind = CombKind::Deterministic)
      : teeth_(std::move(teeth)), op_(std::move(op)), kind_(kind) {
    const SpaceTuple all = comb_spaces(teeth_);
    if (!all.same_labels(op_.spaces())) {
      throw SpaceMismatch("comb operator spaces do not match its teeth");
    }
  }

  const std::vector<Tooth>& teeth() const noexcept { return teeth_; }
  const Operator& op() const noexcept { return op_; }
  CombKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return teeth_.size(); }

 private:
  std::vector<Tooth> teeth_;
  Operator op_;
  CombKind kind_;
};

/// J = I / (d_out_0 ... d_out_{N-1}); the comb of N identity-free slots
/// joined by a maximally mixing memory.
inline Operator normalized_identity_comb(const std::vector<Tooth>& teeth) {
  double d_out = 1.0;
  for (const auto& t : teeth) d_out *= static_cast<double>(t.out.total_dim());
  Operator j = Operator::identity(comb_spaces(teeth));
  j *= cplx(1.0 / d_out, 0.0);
  return j;
}

struct DeterministicReport {
  bool ok = false;
  bool not_psd = false;
  std::size_t level = 0;  // failing level j when !ok && !not_psd
  double residual = 0.0;  // failing residual, or the largest one seen
  /// reduced[j] = S^(j) for j = 0..N, S^(0) being the scalar 1.
  std::vector<Operator> reduced;

  /// Throws the matching error when validation failed.
  void raise() const {
    if (ok) return;
    if (not_psd) throw NotPSD("comb operator has negative eigenvalues");
    throw LevelViolation(level, residual);
  }
};

/// Checks Tr_{out_{j-1}} S^(j) = I_{in_{j-1}} (x) S^(j-1) from the last tooth
/// down, and Tr_{out_0} S^(1) = I_{in_0}.  Level conditions are checked
/// before positivity.
inline DeterministicReport validate_deterministic(
    const Operator& op, const std::vector<Tooth>& teeth, double tol = kCombTol) {
  const SpaceTuple all = comb_spaces(teeth);
  if (!all.same_labels(op.spaces())) {
    throw SpaceMismatch("comb operator spaces do not match its teeth");
  }
  DeterministicReport rep;
  const std::size_t n = teeth.size();
  std::vector<Operator> reduced(n + 1);
  reduced[n] = align(op, all);
  if (n == 0) {
    rep.residual = std::abs(op.value() - cplx(1.0, 0.0));
    if (rep.residual > tol) return rep;
  }
  for (std::size_t j = n; j >= 1; --j) {
    const Tooth& t = teeth[j - 1];
    const Operator x = partial_trace(reduced[j], t.out);
    double res = 0.0;
    if (j == 1) {
      res = max_abs_diff(x, Operator::identity(t.in));
      reduced[0] = Operator::scalar(1.0);
    } else {
      Operator prev = partial_trace(x, t.in);
      prev *= cplx(1.0 / static_cast<double>(t.in.total_dim()), 0.0);
      res = max_abs_diff(x, tensor(Operator::identity(t.in), prev));
      reduced[j - 1] = std::move(prev);
    }
    rep.residual = std::max(rep.residual, res);
    if (res > tol) {
      rep.level = j;
      rep.residual = res;
      return rep;
    }
  }
  if (!is_psd(op, tol)) {
    rep.not_psd = true;
    return rep;
  }
  rep.ok = true;
  rep.reduced = std::move(reduced);
  return rep;
}

inline DeterministicReport validate_deterministic(const Comb& c,
                                                  double tol = kCombTol) {
  return validate_deterministic(c.op(), c.teeth(), tol);
}

/// Reduced combs S^(0..N) of a deterministic comb; throws on failure.
inline std::vector<Operator> reduced_combs(const Operator& op,
                                           const std::vector<Tooth>& teeth,
                                           double tol = kCombTol) {
  auto rep = validate_deterministic(op, teeth, tol);
  if (!rep.ok) {
    throw NotDeterministicComb(rep.not_psd
                                   ? std::string("operator is not PSD")
                                   : "LevelViolation j=" +
                                         std::to_string(rep.level));
  }
  return std::move(rep.reduced);
}

/// Orthogonal projection (Hilbert-Schmidt) onto the affine set of operators
/// satisfying the normalization hierarchy of `teeth`.  Positivity is not
/// imposed.
///
/// With T_A X = Tr_A X (x) I_A / d_A, the homogeneous constraints are
/// T_{A_0} X = 0 and T_{A_k} X = T_{B_k} X for k >= 1, where A_k holds out_k and
/// every later label and B_k = A_k + in_k.  The maps I - T_{A_0} and
/// I - T_{A_k} + T_{B_k} are commuting orthogonal projectors, so their product
/// projects onto the solution space.
class HierarchyProjector {
 public:
  explicit HierarchyProjector(std::vector<Tooth> teeth)
      : teeth_(std::move(teeth)),
        spaces_(comb_spaces(teeth_)),
        anchor_(normalized_identity_comb(teeth_)) {
    const std::size_t n = teeth_.size();
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<std::string> a = teeth_[k].out.labels();
      for (std::size_t l = k + 1; l < n; ++l) {
        for (const auto& s : teeth_[l].in) a.push_back(s.label);
        for (const auto& s : teeth_[l].out) a.push_back(s.label);
      }
      std::vector<std::string> b = a;
      for (const auto& s : teeth_[k].in) b.push_back(s.label);
      a_.push_back(std::move(a));
      b_.push_back(std::move(b));
    }
  }

  const SpaceTuple& spaces() const noexcept { return spaces_; }
  const Operator& anchor() const noexcept { return anchor_; }

  /// Projection onto the linear (homogeneous) constraint space.
  Operator project_linear(const Operator& x) const {
    Operator y = align(x, spaces_);
    for (std::size_t k = 0; k < a_.size(); ++k) {
      if (k == 0) {
        y -= trace_replace(y, a_[0]);
      } else {
        Operator ta = trace_replace(y, a_[k]);
        Operator tb = trace_replace(y, b_[k]);
        y -= ta;
        y += tb;
      }
    }
    return y;
  }

  /// Projection onto the affine hierarchy set.
  Operator project(const Operator& x) const {
    return anchor_ + project_linear(x - anchor_);
  }

 private:
  std::vector<Tooth> teeth_;
  SpaceTuple spaces_;
  Operator anchor_;
  std::vector<std::vector<std::string>> a_;
  std::vector<std::vector<std::string>> b_;
};

struct FeasibilityResult {
  bool feasible = false;
  Operator witness;  // deterministic S with S >= R (last iterate if !feasible)
  std::size_t iterations = 0;
  double residual = 0.0;  // max(0, -lambda_min(S - R))
};

/// Searches a deterministic comb S >= R by Dykstra's alternating projections
/// between {S : S - R >= 0} and the affine hierarchy set, starting from R.
inline FeasibilityResult probabilistic_feasibility(
    const Operator& r, const std::vector<Tooth>& teeth, double tol = 1e-7,
    std::size_t max_iter = 5000) {
  if (!is_psd(r)) throw NotPSD("probabilistic comb candidate is not PSD");
  const HierarchyProjector proj(teeth);
  const Operator ra = align(r, proj.spaces());
  Operator x = ra;
  Mat p = Mat::Zero(x.matrix().rows(), x.matrix().cols());
  Mat q = p;
  FeasibilityResult out;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Operator y = proj.project(Operator(proj.spaces(), x.matrix() + p));
    p = x.matrix() + p - y.matrix();
    const Mat gap = y.matrix() + q - ra.matrix();
    auto e = linalg::eigh(gap);
    Mat xm = ra.matrix() + linalg::from_eigen(e, e.values.cwiseMax(0.0));
    q = y.matrix() + q - xm;
    x = Operator(proj.spaces(), std::move(xm));
    const double lmin = linalg::min_eigenvalue(y.matrix() - ra.matrix());
    out.witness = std::move(y);
    out.iterations = it;
    out.residual = std::max(0.0, -lmin);
    if (lmin >= -tol) {
      out.feasible = true;
      return out;
    }
  }
  return out;
}

/// A merge schedule for the tensor product of two combs: `order[k]` is 0 or
/// 1 naming which comb supplies the k-th tooth of the interleaving, and each
/// entry k of `merges` fuses interleaved teeth k and k+1.
struct Schedule {
  std::vector<int> order;
  std::vector<std::size_t> merges;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline Comb tensor_combs(const Comb& s, const Comb& t, const Schedule& sched) {
  const std::size_t n = s.size(), m = t.size();
  if (sched.order.size() != n + m ||
      static_cast<std::size_t>(std::count(sched.order.begin(), sched.order.end(), 0)) != n ||
      static_cast<std::size_t>(std::count(sched.order.begin(), sched.order.end(), 1)) != m) {
    throw InvalidInterleaving("schedule must use each comb's teeth exactly once");
  }
  std::vector<Tooth> seq;
  std::size_t is = 0, it = 0;
  for (int w : sched.order) {
    seq.push_back(w == 0 ? s.teeth()[is++] : t.teeth()[it++]);
  }
  std::vector<std::size_t> merges = sched.merges;
  std::sort(merges.begin(), merges.end());
  for (std::size_t i = 0; i < merges.size(); ++i) {
    const std::size_t k = merges[i];
    if (k + 1 >= seq.size() || sched.order[k] == sched.order[k + 1] ||
        (i > 0 && merges[i - 1] + 1 >= k)) {
      throw NonAdjacentMerge("merge at position " + std::to_string(k) +
                             " is not a disjoint adjacent cross pair");
    }
  }
  std::vector<Tooth> fused;
  std::size_t mi = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (mi < merges.size() && merges[mi] == k) {
      fused.push_back({concat(seq[k].in, seq[k + 1].in),
                       concat(seq[k].out, seq[k + 1].out)});
      ++k;
      ++mi;
    } else {
      fused.push_back(seq[k]);
    }
  }
  const CombKind kind = (s.kind() == CombKind::Deterministic &&
                         t.kind() == CombKind::Deterministic)
                            ? CombKind::Deterministic
                            : CombKind::Probabilistic;
  return Comb(std::move(fused), tensor(s.op(), t.op()), kind);
}

/// Every interleaving of an n-comb with an m-comb together with every set of
/// disjoint adjacent cross-comb merges.
inline std::vector<Schedule> enumerate_schedules(std::size_t n, std::size_t m) {
  std::vector<Schedule> out;
  std::vector<int> order(n, 0);
  order.resize(n + m, 1);
  std::sort(order.begin(), order.end());
  do {
    std::vector<std::size_t> cross;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      if (order[k] != order[k + 1]) cross.push_back(k);
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << cross.size()); ++mask) {
      std::vector<std::size_t> merges;
      bool ok = true;
      for (std::size_t b = 0; b < cross.size() && ok; ++b) {
        if (!(mask >> b & 1)) continue;
        if (!merges.empty() && merges.back() + 1 >= cross[b]) ok = false;
        merges.push_back(cross[b]);
      }
      if (ok) out.push_back({order, std::move(merges)});
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

/// True iff `r` satisfies the deterministic hierarchy for every tooth order
/// that keeps i before j unless (i, j) is listed as independent.
inline bool s_i_membership(
    const Operator& r, const std::vector<Tooth>& teeth,
    const std::vector<std::pair<std::size_t, std::size_t>>& independent,
    double tol = kCombTol) {
  const std::size_t n = teeth.size();
  auto is_independent = [&](std::size_t i, std::size_t j) {
    for (const auto& [a, b] : independent) {
      if ((a == i && b == j) || (a == j && b == i)) return true;
    }
    return false;
  };
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    std::vector<std::size_t> pos(n);
    for (std::size_t k = 0; k < n; ++k) pos[perm[k]] = k;
    bool allowed = true;
    for (std::size_t i = 0; i < n && allowed; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (pos[i] > pos[j] && !is_independent(i, j)) {
          allowed = false;
          break;
        }
      }
    }
    if (!allowed) continue;
    std::vector<Tooth> reordered;
    for (auto k : perm) reordered.push_back(teeth[k]);
    if (!validate_deterministic(r, reordered, tol).ok) return false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return true;
}

}  // namespace qcomb
