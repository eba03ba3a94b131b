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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qcomb/error.hpp"
#include "qcomb/linalg.hpp"
#include "qcomb/spaces.hpp"

namespace qcomb {

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kRankCutoff = 1e-10;

/// Dense square operator on a labeled tensor product.
class Operator {
 public:
  Operator() : matrix_(Mat::Ones(1, 1)) {}

  Operator(SpaceTuple spaces, Mat matrix)
      : spaces_(std::move(spaces)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(spaces_.total_dim());
    if (matrix_.rows() != d || matrix_.cols() != d) {
      throw ShapeMismatch("matrix is " + std::to_string(matrix_.rows()) + "x" +
                          std::to_string(matrix_.cols()) +
                          ", spaces need side " + std::to_string(d));
    }
  }

  static Operator identity(const SpaceTuple& spaces) {
    const auto d = static_cast<Eigen::Index>(spaces.total_dim());
    return Operator(spaces, Mat::Identity(d, d));
  }

  static Operator scalar(cplx value) {
    return Operator(SpaceTuple{}, Mat::Constant(1, 1, value));
  }

  const SpaceTuple& spaces() const noexcept { return spaces_; }
  const Mat& matrix() const noexcept { return matrix_; }
  Mat& matrix() noexcept { return matrix_; }
  std::size_t dim() const noexcept { return spaces_.total_dim(); }

  /// Value of a 1x1 operator.
  cplx value() const {
    if (matrix_.size() != 1) {
      throw ShapeMismatch("operator is not a scalar");
    }
    return matrix_(0, 0);
  }

  cplx trace() const { return matrix_.trace(); }

  Operator adjoint() const { return Operator(spaces_, matrix_.adjoint()); }

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(cplx s) {
    matrix_ *= s;
    return *this;
  }

 private:
  SpaceTuple spaces_;
  Mat matrix_;
};

/// Pure vector on a labeled tensor product.
struct Ket {
  SpaceTuple spaces;
  Vec vec;

  Operator projector() const {
    return Operator(spaces, vec * vec.adjoint());
  }
};

namespace detail {

inline std::vector<std::size_t> strides(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

/// For a reordering `new_order` of the labels of `t`, returns for every basis
/// index of the reordered tuple the matching index of `t`.
inline std::vector<Eigen::Index> index_map(
    const SpaceTuple& t, const std::vector<std::string>& new_order) {
  const auto old_strides = strides(t.dims());
  std::vector<std::size_t> dims, src_stride;
  for (const auto& l : new_order) {
    auto p = t.position(l);
    dims.push_back(t[*p].dim);
    src_stride.push_back(old_strides[*p]);
  }
  const std::size_t total = t.total_dim();
  std::vector<Eigen::Index> map(total);
  std::vector<std::size_t> digit(dims.size(), 0);
  std::size_t src = 0;
  for (std::size_t i = 0; i < total; ++i) {
    map[i] = static_cast<Eigen::Index>(src);
    // odometer increment, last digit fastest
    for (std::size_t k = dims.size(); k-- > 0;) {
      if (++digit[k] < dims[k]) {
        src += src_stride[k];
        break;
      }
      src -= src_stride[k] * (dims[k] - 1);
      digit[k] = 0;
    }
  }
  return map;
}

inline void check_labels(const SpaceTuple& t,
                         const std::vector<std::string>& labels) {
  for (const auto& l : labels) {
    if (!t.contains(l)) throw UnknownLabel("label '" + l + "' not in operator");
  }
}

}  // namespace detail

/// Reorders the tensor factors; `new_order` must be a permutation of the
/// operator's labels.
inline Operator permute(const Operator& m,
                        const std::vector<std::string>& new_order) {
  const auto& t = m.spaces();
  if (new_order.size() != t.size()) {
    throw NotPermutation("expected " + std::to_string(t.size()) + " labels");
  }
  for (const auto& l : new_order) {
    if (!t.contains(l)) throw NotPermutation("label '" + l + "' not in operator");
  }
  SpaceTuple nt = t.select(new_order);  // rejects duplicates
  if (nt.labels() == t.labels()) return m;
  auto map = detail::index_map(t, new_order);
  const auto d = static_cast<Eigen::Index>(map.size());
  Mat out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) out(i, j) = m.matrix()(map[i], map[j]);
  }
  return Operator(std::move(nt), std::move(out));
}

/// Brings `m` into the factor order of `target` (same label set required).
inline Operator align(const Operator& m, const SpaceTuple& target) {
  if (!m.spaces().same_labels(target)) {
    throw SpaceMismatch("operators act on different spaces");
  }
  return permute(m, target.labels());
}

inline Operator& Operator::operator+=(const Operator& o) {
  matrix_ += align(o, spaces_).matrix();
  return *this;
}

inline Operator& Operator::operator-=(const Operator& o) {
  matrix_ -= align(o, spaces_).matrix();
  return *this;
}

inline Operator operator+(Operator a, const Operator& b) { return a += b; }
inline Operator operator-(Operator a, const Operator& b) { return a -= b; }
inline Operator operator*(cplx s, Operator a) { return a *= s; }
inline Operator operator*(double s, Operator a) { return a *= cplx(s, 0.0); }

/// Max-entry distance between two operators on the same label set.
inline double max_abs_diff(const Operator& a, const Operator& b) {
  return linalg::max_abs(a.matrix() - align(b, a.spaces()).matrix());
}

inline Operator tensor(const Operator& a, const Operator& b) {
  SpaceTuple t = concat(a.spaces(), b.spaces());  // rejects shared labels
  const auto da = a.matrix().rows();
  const auto db = b.matrix().rows();
  Mat out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  return Operator(std::move(t), std::move(out));
}

/// Partial trace over `over`; remaining factors keep their order.
inline Operator partial_trace(const Operator& m,
                              const std::vector<std::string>& over) {
  detail::check_labels(m.spaces(), over);
  if (over.empty()) return m;
  SpaceTuple kept = difference(m.spaces(), over);
  SpaceTuple traced = m.spaces().select(over);
  std::vector<std::string> order = kept.labels();
  for (const auto& l : traced.labels()) order.push_back(l);
  const Operator p = permute(m, order);
  const auto dk = static_cast<Eigen::Index>(kept.total_dim());
  const auto dt = static_cast<Eigen::Index>(traced.total_dim());
  Mat out = Mat::Zero(dk, dk);
  for (Eigen::Index t = 0; t < dt; ++t) {
    for (Eigen::Index b = 0; b < dk; ++b) {
      for (Eigen::Index a = 0; a < dk; ++a) {
        out(a, b) += p.matrix()(a * dt + t, b * dt + t);
      }
    }
  }
  return Operator(std::move(kept), std::move(out));
}

inline Operator partial_trace(const Operator& m, const SpaceTuple& over) {
  return partial_trace(m, over.labels());
}

/// Transpose of the selected factors in the computational basis.
inline Operator partial_transpose(const Operator& m,
                                  const std::vector<std::string>& on) {
  detail::check_labels(m.spaces(), on);
  const auto& t = m.spaces();
  const auto st = detail::strides(t.dims());
  const auto d = static_cast<Eigen::Index>(t.total_dim());
  // sel[i] is the part of index i carried by the selected factors
  std::vector<Eigen::Index> sel(d, 0);
  std::vector<std::size_t> pos;
  for (const auto& l : on) pos.push_back(*t.position(l));
  for (Eigen::Index i = 0; i < d; ++i) {
    Eigen::Index s = 0;
    for (auto p : pos) {
      const auto stride = static_cast<Eigen::Index>(st[p]);
      const auto dim = static_cast<Eigen::Index>(t[p].dim);
      s += ((i / stride) % dim) * stride;
    }
    sel[i] = s;
  }
  Mat out(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      out(i, j) = m.matrix()(i - sel[i] + sel[j], j - sel[j] + sel[i]);
    }
  }
  return Operator(t, std::move(out));
}

inline Operator partial_transpose(const Operator& m, const SpaceTuple& on) {
  return partial_transpose(m, on.labels());
}

inline Operator transpose(const Operator& m) {
  return Operator(m.spaces(), m.matrix().transpose());
}

inline Operator conjugate(const Operator& m) {
  return Operator(m.spaces(), m.matrix().conjugate());
}

/// Renames labels; labels absent from `renames` are kept.
inline Operator relabel(const Operator& m,
                        const std::map<std::string, std::string>& renames) {
  std::vector<Space> s;
  for (const auto& sp : m.spaces()) {
    auto it = renames.find(sp.label);
    s.push_back({it == renames.end() ? sp.label : it->second, sp.dim});
  }
  return Operator(SpaceTuple(std::move(s)), m.matrix());
}

inline bool is_hermitian(const Operator& m, double tol = kHermitianTol) {
  return linalg::max_abs(m.matrix() - m.matrix().adjoint()) <= tol;
}

/// PSD within a floor of -tol scaled by the largest entry magnitude.
inline bool is_psd(const Operator& m, double tol = kPsdTol) {
  const double scale = linalg::max_abs(m.matrix());
  if (!is_hermitian(m, kHermitianTol * std::max(1.0, scale))) return false;
  return linalg::min_eigenvalue(m.matrix()) >= -tol * scale;
}

inline std::size_t rank(const Operator& m, double rel_cutoff = kRankCutoff) {
  return linalg::numerical_rank(m.matrix(), rel_cutoff);
}

/// T_A X = Tr_A X (x) I_A / d_A, laid out in the original factor order.
inline Operator trace_replace(const Operator& m,
                              const std::vector<std::string>& over) {
  if (over.empty()) return m;
  const SpaceTuple traced = m.spaces().select(over);
  Operator r = tensor(partial_trace(m, over),
                      Operator::identity(traced));
  r *= cplx(1.0 / static_cast<double>(traced.total_dim()), 0.0);
  return align(r, m.spaces());
}

}  // namespace qcomb
