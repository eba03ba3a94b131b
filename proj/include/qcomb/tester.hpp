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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qcomb/comb.hpp"
#include "qcomb/link.hpp"

namespace qcomb {

/// Teeth of a tester probing combs with `comb_teeth`: the tester prepares
/// in_0, then maps out_k to in_{k+1}, and finally absorbs out_{N-1}.
inline std::vector<Tooth> tester_teeth(const std::vector<Tooth>& comb_teeth) {
  std::vector<Tooth> t;
  SpaceTuple prev;
  for (const auto& c : comb_teeth) {
    t.push_back({prev, c.in});
    prev = c.out;
  }
  t.push_back({prev, SpaceTuple{}});
  return t;
}

/// A finite family of positive operators on the spaces of the combs it
/// probes.  `teeth` are the teeth of those combs.
struct Tester {
  std::vector<Tooth> teeth;
  std::vector<Operator> elements;

  SpaceTuple spaces() const { return comb_spaces(teeth); }

  Operator normalization() const {
    const SpaceTuple s = spaces();
    Operator t(s, Mat::Zero(s.total_dim(), s.total_dim()));
    for (const auto& e : elements) t += e;
    return t;
  }
};

struct TesterReport {
  bool ok = false;
  std::optional<std::size_t> bad_element;  // first non-PSD element
  std::size_t level = 0;                   // failing hierarchy level
  double residual = 0.0;
  std::optional<Operator> theta;  // T = I_{out_{N-1}} (x) theta when ok

  void raise() const {
    if (ok) return;
    if (bad_element) {
      throw InvalidTester("element " + std::to_string(*bad_element) + " is not PSD");
    }
    throw InvalidTester("LevelViolation j=" + std::to_string(level) +
                        " residual=" + std::to_string(residual));
  }
};

inline TesterReport validate_tester(const Tester& p, double tol = kCombTol) {
  TesterReport rep;
  const SpaceTuple s = p.spaces();
  for (std::size_t i = 0; i < p.elements.size(); ++i) {
    if (!p.elements[i].spaces().same_labels(s)) {
      throw SpaceMismatch("tester element " + std::to_string(i) +
                          " does not act on the tester spaces");
    }
    if (!is_psd(p.elements[i], tol)) {
      rep.bad_element = i;
      return rep;
    }
  }
  const auto tt = tester_teeth(p.teeth);
  auto d = validate_deterministic(p.normalization(), tt, tol);
  if (!d.ok) {
    rep.level = d.level;
    rep.residual = d.residual;
    return rep;
  }
  rep.ok = true;
  rep.theta = d.reduced[tt.size() - 1];
  return rep;
}

/// p(i|R) = Tr[P_i^T R] = P_i * R.
inline double born(const Operator& element, const Operator& comb) {
  if (!element.spaces().same_labels(comb.spaces())) {
    throw SpaceMismatch("tester element and comb act on different spaces");
  }
  return link(element, comb).value().real();
}

inline std::vector<double> born(const Tester& p, const Operator& comb) {
  std::vector<double> out;
  for (const auto& e : p.elements) out.push_back(born(e, comb));
  return out;
}

/// Coherent stage R -> sqrt(T)^T R sqrt(T)^T followed by an ordinary POVM.
struct TesterRealization {
  Operator sqrt_t_transpose;
  std::vector<Operator> povm;

  Operator coherent(const Operator& r) const {
    const Operator ra = align(r, sqrt_t_transpose.spaces());
    return Operator(ra.spaces(), sqrt_t_transpose.matrix() * ra.matrix() *
                                     sqrt_t_transpose.matrix());
  }
};

/// P~_i = sqrt(T)^+ P_i sqrt(T)^+ + (I - Pi)/k, where Pi projects on the
/// support of T.
inline TesterRealization realize_tester(const Tester& p) {
  if (p.elements.empty()) throw InvalidTester("tester has no elements");
  const Operator t = p.normalization();
  const SpaceTuple& s = t.spaces();
  // one eigenbasis and one cutoff (on the eigenvalues of T) for sqrt(T),
  // its pseudo-inverse and the support projector
  auto e = linalg::eigh(t.matrix());
  const double cut = kRankCutoff * linalg::spectral_scale(e.values);
  const RVec kept = e.values.unaryExpr([cut](double x) { return x > cut ? 1.0 : 0.0; });
  const RVec sq = e.values.cwiseMax(0.0).cwiseSqrt().cwiseProduct(kept);
  const RVec inv_sq = sq.unaryExpr([](double x) { return x > 0.0 ? 1.0 / x : 0.0; });
  const Mat root = linalg::from_eigen(e, sq);
  const Mat root_pinv = linalg::from_eigen(e, inv_sq);
  const Mat pi = linalg::from_eigen(e, kept);
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  const Mat q = (Mat::Identity(d, d) - pi) / static_cast<double>(p.elements.size());
  TesterRealization out{Operator(s, root.transpose()), {}};
  for (const auto& e : p.elements) {
    const Mat pe = align(e, s).matrix();
    out.povm.emplace_back(s, linalg::hermitize(root_pinv * pe * root_pinv + q));
  }
  return out;
}

namespace detail {

/// Columns are the elements flattened row-major.
inline Mat element_columns(const std::vector<Operator>& elems, const SpaceTuple& s,
                           bool transpose) {
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  Mat cols(d * d, static_cast<Eigen::Index>(elems.size()));
  for (std::size_t i = 0; i < elems.size(); ++i) {
    Mat m = align(elems[i], s).matrix();
    if (transpose) m.transposeInPlace();
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) cols(a * d + b, static_cast<Eigen::Index>(i)) = m(a, b);
    }
  }
  return cols;
}

inline std::size_t span_dim(const Mat& cols) {
  if (cols.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(cols);
  const auto& sv = svd.singularValues();
  const double cut = 1e-10 * (sv.size() ? sv(0) : 0.0);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r;
  }
  return r;
}

}  // namespace detail

/// Dimension of span{P_i}.
inline std::size_t tester_span_dim(const Tester& p) {
  return detail::span_dim(detail::element_columns(p.elements, p.spaces(), false));
}

inline bool is_info_complete(const Tester& p) {
  const std::size_t d = p.spaces().total_dim();
  return tester_span_dim(p) == d * d;
}

/// Whether span{P_i^T} contains every X with Tr_{out_{N-1}} X = I (x) Y.
inline bool is_info_complete_deterministic(const Tester& p, double tol = 1e-9) {
  if (p.teeth.empty()) return is_info_complete(p);
  const SpaceTuple s = p.spaces();
  const auto d = static_cast<Eigen::Index>(s.total_dim());
  const Mat cols = detail::element_columns(p.elements, s, true);
  Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = 1e-10 * (sv.size() ? sv(0) : 0.0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  const Mat basis = svd.matrixU().leftCols(r);

  const Tooth& last = p.teeth.back();
  std::vector<std::string> a = last.out.labels();
  std::vector<std::string> b = a;
  for (const auto& sp : last.in) b.push_back(sp.label);
  // the subspace is the range of I - T_A + T_B; its images of the matrix
  // units span it
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      Mat e = Mat::Zero(d, d);
      e(i, j) = 1.0;
      Operator x(s, e);
      Operator y = x - trace_replace(x, a) + trace_replace(x, b);
      Vec v(d * d);
      for (Eigen::Index u = 0; u < d; ++u) {
        for (Eigen::Index w = 0; w < d; ++w) v(u * d + w) = y.matrix()(u, w);
      }
      const Vec resid = v - basis * (basis.adjoint() * v);
      if (resid.cwiseAbs().maxCoeff() > tol) return false;
    }
  }
  return true;
}

/// P_i = P~_i / (product of the comb input dimensions).
inline Tester info_complete_tester(const std::vector<Operator>& base_povm,
                                   const std::vector<Tooth>& comb_teeth) {
  Tester t{comb_teeth, {}};
  const SpaceTuple s = t.spaces();
  const std::size_t d = s.total_dim();
  Operator sum(s, Mat::Zero(d, d));
  for (const auto& e : base_povm) {
    if (!is_psd(e)) throw InvalidTester("base POVM element is not PSD");
    sum += e;
  }
  if (max_abs_diff(sum, Operator::identity(s)) > 1e-9) {
    throw InvalidTester("base POVM does not sum to the identity");
  }
  if (detail::span_dim(detail::element_columns(base_povm, s, false)) != d * d) {
    throw BaseNotComplete("base POVM spans less than the full operator space");
  }
  double scale = 1.0;
  for (const auto& tooth : comb_teeth) scale *= static_cast<double>(tooth.in.total_dim());
  for (const auto& e : base_povm) t.elements.push_back((1.0 / scale) * align(e, s));
  return t;
}

struct InfoCompleteFactors {
  Operator theta_root;             // sqrt(theta)
  std::vector<Operator> base_povm;  // (I (x) theta^-1/2) P_i (I (x) theta^-1/2)
};

inline InfoCompleteFactors factorize_info_complete(const Tester& p) {
  auto rep = validate_tester(p);
  rep.raise();
  const Operator& theta = *rep.theta;
  auto e = linalg::eigh(theta.matrix());
  const double scale = linalg::spectral_scale(e.values);
  if (e.values.size() == 0 || e.values(0) <= kRankCutoff * scale) {
    throw ThetaSingular("theta is singular although the tester was reported complete");
  }
  const Mat root = linalg::from_eigen(e, e.values.cwiseSqrt());
  const Mat inv_root = linalg::from_eigen(e, e.values.cwiseSqrt().cwiseInverse());
  const SpaceTuple last_out = p.teeth.empty() ? SpaceTuple{} : p.teeth.back().out;
  const Operator w = tensor(Operator::identity(last_out), Operator(theta.spaces(), inv_root));
  InfoCompleteFactors out{Operator(theta.spaces(), root), {}};
  for (const auto& el : p.elements) {
    const Mat pe = align(el, w.spaces()).matrix();
    out.base_povm.emplace_back(w.spaces(), w.matrix() * pe * w.matrix());
  }
  return out;
}

}  // namespace qcomb
