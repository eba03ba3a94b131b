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
#include <string>
#include <vector>

#include "qcomb/choi.hpp"
#include "qcomb/comb.hpp"
#include "qcomb/link.hpp"

namespace qcomb {

inline constexpr double kRealizeTol = 1e-7;

enum class FinalPolicy { TraceOut, Measure };

/// Step j maps (in_j (x) anc_j) -> (out_j (x) anc_{j+1}); anc_0 has dim 1.
/// Row index of a step matrix is (out_j, anc_{j+1}), column index is
/// (in_j, anc_j), ancilla least significant.
struct IsometrySequence {
  std::vector<Tooth> teeth;
  std::vector<Mat> steps;
  std::vector<std::size_t> ancilla_dims;  // anc_0 .. anc_N
  FinalPolicy final_policy = FinalPolicy::TraceOut;
};

namespace detail {

inline std::string fresh_label(const SpaceTuple& taken, const std::string& base) {
  std::string l = base;
  while (taken.contains(l)) l += "'";
  return l;
}

/// Stinespring matrix of the canonical Kraus form of a j-comb viewed as a
/// channel from its inputs to its outputs: W[(outs, a), ins] = K_a[outs, ins].
/// Also returns the Kraus weights (squared Hilbert-Schmidt norms).
struct CanonicalDilation {
  Mat w;
  RVec weights;
  std::size_t rank = 0;
};

inline CanonicalDilation canonical_dilation(const Operator& s,
                                            const SpaceTuple& outs,
                                            const SpaceTuple& ins) {
  const Operator p = align(s, concat(outs, ins));
  const auto d_o = static_cast<Eigen::Index>(outs.total_dim());
  const auto di = static_cast<Eigen::Index>(ins.total_dim());
  auto e = linalg::eigh(p.matrix());
  const double cut = kRankCutoff * linalg::spectral_scale(e.values);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = e.values.size(); i-- > 0;) {
    if (e.values(i) > cut) keep.push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(keep.size());
  CanonicalDilation out;
  out.rank = keep.size();
  out.weights.resize(r);
  out.w = Mat::Zero(d_o * r, di);
  for (Eigen::Index k = 0; k < r; ++k) {
    const Eigen::Index idx = keep[k];
    out.weights(k) = e.values(idx);
    const Vec v = std::sqrt(e.values(idx)) * e.vectors.col(idx);
    for (Eigen::Index o = 0; o < d_o; ++o) {
      for (Eigen::Index x = 0; x < di; ++x) out.w(o * r + k, x) = v(o * di + x);
    }
  }
  return out;
}

}  // namespace detail

/// Choi operators of every step of `seq`, with ancilla spaces labeled so
/// that consecutive steps share them.  The final ancilla is traced out.
inline std::vector<Operator> step_chois(const IsometrySequence& seq) {
  const SpaceTuple all = comb_spaces(seq.teeth);
  std::vector<std::string> anc;
  SpaceTuple taken = all;
  for (std::size_t j = 0; j < seq.ancilla_dims.size(); ++j) {
    anc.push_back(detail::fresh_label(taken, "anc" + std::to_string(j)));
    taken = concat(taken, SpaceTuple{{anc.back(), 1}});
  }
  std::vector<Operator> out;
  for (std::size_t j = 0; j < seq.steps.size(); ++j) {
    SpaceTuple in = seq.teeth[j].in;
    if (j > 0) in = concat(in, SpaceTuple{{anc[j], seq.ancilla_dims[j]}});
    SpaceTuple o =
        concat(seq.teeth[j].out, SpaceTuple{{anc[j + 1], seq.ancilla_dims[j + 1]}});
    Operator c = double_ket(seq.steps[j], in, o).projector();
    if (j + 1 == seq.steps.size()) c = partial_trace(c, {anc[j + 1]});
    out.push_back(std::move(c));
  }
  return out;
}

/// The comb realized by a sequence, via link_chain over its steps.
inline Operator recompose(const IsometrySequence& seq) {
  if (seq.steps.empty()) return Operator::scalar(1.0);
  return align(link_chain(step_chois(seq)), comb_spaces(seq.teeth));
}

/// Minimal Stinespring isometry of a channel (deterministic 1-comb); rows are
/// (out, anc) with the ancilla least significant.
inline Mat minimal_stinespring(const Comb& c, double tol = kCombTol) {
  if (c.size() != 1) throw NotDeterministicComb("expected a 1-comb");
  auto rep = validate_deterministic(c, tol);
  if (!rep.ok) throw NotDeterministicComb("channel fails normalization");
  return detail::canonical_dilation(c.op(), c.teeth()[0].out, c.teeth()[0].in).w;
}

/// Splits a deterministic comb into a sequence of isometries joined by an
/// ancilla.  Step j connects the canonical dilations of S^(j) and S^(j+1).
inline IsometrySequence realize_comb(const Comb& c, double tol = kCombTol) {
  auto rep = validate_deterministic(c, tol);
  if (!rep.ok) {
    throw NotDeterministicComb(rep.not_psd ? std::string("operator is not PSD")
                                           : "LevelViolation j=" +
                                                 std::to_string(rep.level));
  }
  const auto& teeth = c.teeth();
  const std::size_t n = teeth.size();
  IsometrySequence seq;
  seq.teeth = teeth;
  seq.ancilla_dims.push_back(1);

  SpaceTuple outs, ins;
  detail::CanonicalDilation prev;
  prev.w = Mat::Ones(1, 1);
  prev.weights = RVec::Ones(1);
  prev.rank = 1;
  for (std::size_t j = 0; j < n; ++j) {
    const SpaceTuple outs_next = concat(outs, teeth[j].out);
    const SpaceTuple ins_next = concat(ins, teeth[j].in);
    auto next = detail::canonical_dilation(rep.reduced[j + 1], outs_next, ins_next);

    const auto d_lo = static_cast<Eigen::Index>(outs.total_dim());  // o<
    const auto d_li = static_cast<Eigen::Index>(ins.total_dim());   // x<
    const auto d_o = static_cast<Eigen::Index>(teeth[j].out.total_dim());
    const auto d_x = static_cast<Eigen::Index>(teeth[j].in.total_dim());
    const auto ra = static_cast<Eigen::Index>(prev.rank);
    const auto rb = static_cast<Eigen::Index>(next.rank);

    // T[(o_j,b),(o<,x<,x_j)] = W'[(o<,o_j,b),(x<,x_j)]
    // G[(x_j,a),(o<,x<,x_j')] = delta(x_j,x_j') W[(o<,a),x<]
    const Eigen::Index cols = d_lo * d_li * d_x;
    Mat t(d_o * rb, cols);
    Mat g = Mat::Zero(d_x * ra, cols);
    for (Eigen::Index ol = 0; ol < d_lo; ++ol) {
      for (Eigen::Index xl = 0; xl < d_li; ++xl) {
        for (Eigen::Index xj = 0; xj < d_x; ++xj) {
          const Eigen::Index col = (ol * d_li + xl) * d_x + xj;
          for (Eigen::Index oj = 0; oj < d_o; ++oj) {
            for (Eigen::Index b = 0; b < rb; ++b) {
              t(oj * rb + b, col) =
                  next.w((ol * d_o + oj) * rb + b, xl * d_x + xj);
            }
          }
          for (Eigen::Index a = 0; a < ra; ++a) {
            g(xj * ra + a, col) = prev.w(ol * ra + a, xl);
          }
        }
      }
    }
    // G G^dagger is diagonal with the Kraus weights of S^(j).
    RVec inv(d_x * ra);
    for (Eigen::Index xj = 0; xj < d_x; ++xj) {
      for (Eigen::Index a = 0; a < ra; ++a) inv(xj * ra + a) = 1.0 / prev.weights(a);
    }
    Mat v = t * g.adjoint() * inv.asDiagonal();
    v = linalg::nearest_isometry(v);
    const double res = linalg::max_abs(t - v * g);
    if (res > kRealizeTol) {
      throw NumericalRankFailure("step " + std::to_string(j) +
                                 " Kraus relation residual " + std::to_string(res));
    }
    seq.steps.push_back(std::move(v));
    seq.ancilla_dims.push_back(next.rank);
    outs = outs_next;
    ins = ins_next;
    prev = std::move(next);
  }
  return seq;
}

struct Complexity {
  std::size_t d_max = 0;
  std::size_t r = 0;
};

/// Ancilla-size and coherent-control bounds from the ranks of the reduced
/// combs.  rank S^(0) is taken as 1.
inline Complexity complexity(const Comb& c, double tol = kCombTol) {
  auto rep = validate_deterministic(c, tol);
  if (!rep.ok) throw NotDeterministicComb("comb fails normalization");
  const auto& teeth = c.teeth();
  const std::size_t n = teeth.size();
  std::vector<std::size_t> ranks(n + 1, 1);
  for (std::size_t j = 1; j <= n; ++j) ranks[j] = rank(rep.reduced[j]);
  Complexity out;
  for (std::size_t j = 1; j <= n; ++j) out.d_max = std::max(out.d_max, ranks[j]);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const std::size_t d = std::max(teeth[j].out.total_dim(), teeth[j + 1].in.total_dim());
    out.r = std::max(out.r, ranks[j] * d);
  }
  if (n > 0) out.r = std::max(out.r, ranks[n] * teeth[n - 1].out.total_dim());
  return out;
}

/// Realization of an instrument: one isometry sequence whose last output
/// carries an extra register, followed by a projective measurement of it.
struct InstrumentRealization {
  IsometrySequence sequence;
  Space outcome;                    // register appended to the last output
  std::vector<Operator> projectors;  // |i><i| on `outcome`

  /// The probabilistic comb of outcome i.
  Operator outcome_comb(std::size_t i) const {
    return link(recompose(sequence), projectors.at(i));
  }
};

inline InstrumentRealization realize_instrument(const std::vector<Operator>& elements,
                                                const std::vector<Tooth>& teeth,
                                                double tol = kCombTol) {
  if (elements.empty() || teeth.empty()) {
    throw InvalidArgument("instrument needs at least one element and one tooth");
  }
  const SpaceTuple all = comb_spaces(teeth);
  Operator total = Operator(all, Mat::Zero(all.total_dim(), all.total_dim()));
  for (const auto& e : elements) total += e;
  if (!validate_deterministic(total, teeth, tol).ok) {
    throw SumNotDeterministic("instrument elements do not sum to a deterministic comb");
  }
  const std::size_t k = elements.size();
  const Space reg{detail::fresh_label(all, "outcome"), k};
  std::vector<Tooth> ext = teeth;
  ext.back().out = concat(ext.back().out, SpaceTuple{reg});
  const SpaceTuple ext_all = comb_spaces(ext);
  Operator tilde(ext_all, Mat::Zero(ext_all.total_dim(), ext_all.total_dim()));
  std::vector<Operator> projectors;
  for (std::size_t i = 0; i < k; ++i) {
    Mat p = Mat::Zero(k, k);
    p(i, i) = 1.0;
    Operator proj(SpaceTuple{reg}, p);
    tilde += tensor(align(elements[i], all), proj);
    projectors.push_back(std::move(proj));
  }
  InstrumentRealization out;
  out.sequence = realize_comb(Comb(ext, tilde), tol);
  out.sequence.final_policy = FinalPolicy::Measure;
  out.outcome = reg;
  out.projectors = std::move(projectors);
  return out;
}

}  // namespace qcomb
