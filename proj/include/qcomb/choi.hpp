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
#include <functional>
#include <vector>

#include "qcomb/operator.hpp"

namespace qcomb {

/// A linear map between operator spaces, stored as its Choi operator on
/// output (x) input.
class LinearMapView {
 public:
  LinearMapView(SpaceTuple in, SpaceTuple out, Operator choi)
      : in_(std::move(in)), out_(std::move(out)), choi_(std::move(choi)) {
    choi_ = align(choi_, concat(out_, in_));
  }

  const SpaceTuple& input_spaces() const noexcept { return in_; }
  const SpaceTuple& output_spaces() const noexcept { return out_; }
  const Operator& choi() const noexcept { return choi_; }

 private:
  SpaceTuple in_;
  SpaceTuple out_;
  Operator choi_;
};

/// |X>> = sum_n X|n>|n>, with entry (i, j) of X at index i * d_in + j.
inline Ket double_ket(const Mat& x, const SpaceTuple& in,
                      const SpaceTuple& out) {
  const auto di = static_cast<Eigen::Index>(in.total_dim());
  const auto d_o = static_cast<Eigen::Index>(out.total_dim());
  if (x.rows() != d_o || x.cols() != di) {
    throw ShapeMismatch("matrix is " + std::to_string(x.rows()) + "x" +
                        std::to_string(x.cols()) + ", expected " +
                        std::to_string(d_o) + "x" + std::to_string(di));
  }
  Vec v(d_o * di);
  for (Eigen::Index i = 0; i < d_o; ++i) {
    for (Eigen::Index j = 0; j < di; ++j) v(i * di + j) = x(i, j);
  }
  return {concat(out, in), std::move(v)};
}

/// Inverse of double_ket.
inline Mat unvec(const Vec& v, Eigen::Index d_out, Eigen::Index d_in) {
  Mat x(d_out, d_in);
  for (Eigen::Index i = 0; i < d_out; ++i) {
    for (Eigen::Index j = 0; j < d_in; ++j) x(i, j) = v(i * d_in + j);
  }
  return x;
}

using MapAction = std::function<Mat(const Mat&)>;

inline LinearMapView choi_of_map(const MapAction& action, const SpaceTuple& in,
                                 const SpaceTuple& out) {
  const auto di = static_cast<Eigen::Index>(in.total_dim());
  const auto d_o = static_cast<Eigen::Index>(out.total_dim());
  Mat c = Mat::Zero(d_o * di, d_o * di);
  for (Eigen::Index m = 0; m < di; ++m) {
    for (Eigen::Index n = 0; n < di; ++n) {
      Mat e = Mat::Zero(di, di);
      e(m, n) = 1.0;
      Mat y = action(e);
      if (y.rows() != d_o || y.cols() != d_o) {
        throw ShapeMismatch("map output has wrong shape");
      }
      for (Eigen::Index a = 0; a < d_o; ++a) {
        for (Eigen::Index b = 0; b < d_o; ++b) c(a * di + m, b * di + n) = y(a, b);
      }
    }
  }
  return LinearMapView(in, out, Operator(concat(out, in), std::move(c)));
}

inline Mat apply_map(const LinearMapView& view, const Mat& x) {
  const auto di = static_cast<Eigen::Index>(view.input_spaces().total_dim());
  const auto d_o = static_cast<Eigen::Index>(view.output_spaces().total_dim());
  if (x.rows() != di || x.cols() != di) {
    throw SpaceMismatch("input operator does not match the map's input");
  }
  const Mat& c = view.choi().matrix();
  Mat y = Mat::Zero(d_o, d_o);
  for (Eigen::Index m = 0; m < di; ++m) {
    for (Eigen::Index n = 0; n < di; ++n) {
      const cplx xv = x(m, n);
      if (xv == cplx(0.0, 0.0)) continue;
      for (Eigen::Index a = 0; a < d_o; ++a) {
        for (Eigen::Index b = 0; b < d_o; ++b) y(a, b) += xv * c(a * di + m, b * di + n);
      }
    }
  }
  return y;
}

inline Operator apply_map(const LinearMapView& view, const Operator& x) {
  Operator xa = align(x, view.input_spaces());
  return Operator(view.output_spaces(), apply_map(view, xa.matrix()));
}

/// Choi operator of rho -> sum_k K_k rho K_k^dagger.
inline LinearMapView choi_of_kraus(const std::vector<Mat>& kraus,
                                   const SpaceTuple& in, const SpaceTuple& out) {
  const auto d = static_cast<Eigen::Index>(in.total_dim() * out.total_dim());
  Mat c = Mat::Zero(d, d);
  for (const auto& k : kraus) {
    Vec v = double_ket(k, in, out).vec;
    c += v * v.adjoint();
  }
  return LinearMapView(in, out, Operator(concat(out, in), std::move(c)));
}

/// Canonical Kraus operators from the eigendecomposition of the Choi
/// operator; eigenvalues below the rank cutoff are dropped.
inline std::vector<Mat> kraus_decompose(const LinearMapView& view,
                                        double tol = kPsdTol) {
  if (!is_psd(view.choi(), tol)) {
    throw NotCP("Choi operator is not positive semidefinite");
  }
  const auto di = static_cast<Eigen::Index>(view.input_spaces().total_dim());
  const auto d_o = static_cast<Eigen::Index>(view.output_spaces().total_dim());
  auto e = linalg::eigh(view.choi().matrix());
  const double cut = kRankCutoff * linalg::spectral_scale(e.values);
  std::vector<Mat> out;
  for (Eigen::Index i = e.values.size(); i-- > 0;) {
    if (e.values(i) <= cut) break;
    out.push_back(unvec(std::sqrt(e.values(i)) * e.vectors.col(i), d_o, di));
  }
  return out;
}

}  // namespace qcomb
