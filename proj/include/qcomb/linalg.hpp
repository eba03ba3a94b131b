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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

namespace qcomb {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace linalg {

inline Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

struct HermitianEigen {
  RVec values;  // ascending
  Mat vectors;
};

/// Eigendecomposition of the Hermitian part of `m`.
inline HermitianEigen eigh(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m));
  return {es.eigenvalues(), es.eigenvectors()};
}

inline double min_eigenvalue(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  return eigh(m).values(0);
}

inline Mat from_eigen(const HermitianEigen& e, const RVec& f) {
  return e.vectors * f.asDiagonal() * e.vectors.adjoint();
}

/// Square root of the positive part; tolerance-level negative eigenvalues
/// are clamped to zero.
inline Mat psd_sqrt(const Mat& m) {
  auto e = eigh(m);
  RVec f = e.values.unaryExpr([](double x) { return std::sqrt(std::max(x, 0.0)); });
  return from_eigen(e, f);
}

/// Projection onto the PSD cone in Hilbert-Schmidt norm.
inline Mat psd_part(const Mat& m) {
  auto e = eigh(m);
  RVec f = e.values.cwiseMax(0.0);
  return from_eigen(e, f);
}

inline double spectral_scale(const RVec& values) {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

/// Moore-Penrose inverse of a Hermitian matrix; eigenvalues with magnitude
/// below `rel_cutoff` times the largest are treated as zero.
inline Mat pinv_hermitian(const Mat& m, double rel_cutoff = 1e-10) {
  auto e = eigh(m);
  const double cut = rel_cutoff * spectral_scale(e.values);
  RVec f = e.values.unaryExpr(
      [cut](double x) { return std::abs(x) > cut ? 1.0 / x : 0.0; });
  return from_eigen(e, f);
}

/// Orthogonal projector onto the support (range) of a Hermitian matrix.
inline Mat support_projector(const Mat& m, double rel_cutoff = 1e-10) {
  auto e = eigh(m);
  const double cut = rel_cutoff * spectral_scale(e.values);
  RVec f = e.values.unaryExpr(
      [cut](double x) { return std::abs(x) > cut ? 1.0 : 0.0; });
  return from_eigen(e, f);
}

inline double trace_norm_hermitian(const Mat& m) {
  return eigh(m).values.cwiseAbs().sum();
}

inline std::size_t numerical_rank(const Mat& m, double rel_cutoff = 1e-10) {
  auto e = eigh(m);
  const double cut = rel_cutoff * spectral_scale(e.values);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    if (e.values(i) > cut) ++r;
  }
  return r;
}

/// Polar projection onto the nearest isometry (columns orthonormal).
inline Mat nearest_isometry(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace linalg
}  // namespace qcomb
