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
#include <random>
#include <string>
#include <vector>

#include "qcomb/choi.hpp"
#include "qcomb/comb.hpp"
#include "qcomb/link.hpp"

namespace qcomb::random {

using Rng = std::mt19937_64;

inline Mat ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = cplx(n(rng), n(rng));
  }
  return g;
}

/// Haar-distributed unitary.
inline Mat unitary(std::size_t d, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::HouseholderQR<Mat> qr(ginibre(n, n, rng));
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx di = r(i, i);
    if (std::abs(di) > 0.0) q.col(i) *= di / std::abs(di);
  }
  return q;
}

/// Isometry from d_in to d_out (d_out >= d_in).
inline Mat isometry(std::size_t d_in, std::size_t d_out, Rng& rng) {
  return unitary(d_out, rng).leftCols(static_cast<Eigen::Index>(d_in));
}

inline Vec pure_state(std::size_t d, Rng& rng) {
  Vec v = ginibre(static_cast<Eigen::Index>(d), 1, rng).col(0);
  return v / v.norm();
}

/// Density matrix of rank `rank` (full rank when 0).
inline Mat density(std::size_t d, Rng& rng, std::size_t rank = 0) {
  const auto n = static_cast<Eigen::Index>(d);
  const auto r = static_cast<Eigen::Index>(rank == 0 ? d : rank);
  const Mat g = ginibre(n, r, rng);
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

/// `n_kraus` Kraus operators of a random channel d_in -> d_out.
inline std::vector<Mat> kraus_channel(std::size_t d_in, std::size_t d_out,
                                      std::size_t n_kraus, Rng& rng) {
  if (d_out * n_kraus < d_in) {
    throw InvalidArgument("a channel needs d_out * n_kraus >= d_in");
  }
  const Mat v = isometry(d_in, d_out * n_kraus, rng);
  std::vector<Mat> ks(n_kraus, Mat::Zero(static_cast<Eigen::Index>(d_out),
                                         static_cast<Eigen::Index>(d_in)));
  for (std::size_t o = 0; o < d_out; ++o) {
    for (std::size_t k = 0; k < n_kraus; ++k) {
      ks[k].row(static_cast<Eigen::Index>(o)) =
          v.row(static_cast<Eigen::Index>(o * n_kraus + k));
    }
  }
  return ks;
}

/// Teeth (i0 -> o0), (i1 -> o1), ... with the given dimensions.
inline std::vector<Tooth> simple_teeth(std::size_t n, std::size_t d_in = 2,
                                       std::size_t d_out = 2) {
  std::vector<Tooth> t;
  for (std::size_t k = 0; k < n; ++k) {
    t.push_back({SpaceTuple{{"i" + std::to_string(k), d_in}},
                 SpaceTuple{{"o" + std::to_string(k), d_out}}});
  }
  return t;
}

/// Channels C_k : (in_k, m_k) -> (out_k, m_{k+1}) of a random memory channel
/// on `teeth`; m_0 and m_N are trivial.  Their Choi operators share the
/// memory labels.
inline std::vector<Operator> memory_channel_chois(const std::vector<Tooth>& teeth,
                                                  std::size_t memory_dim,
                                                  std::size_t n_kraus, Rng& rng) {
  std::vector<Operator> ops;
  const std::size_t n = teeth.size();
  for (std::size_t k = 0; k < n; ++k) {
    SpaceTuple in = teeth[k].in;
    SpaceTuple out = teeth[k].out;
    if (k > 0) in = concat(in, SpaceTuple{{"mem" + std::to_string(k), memory_dim}});
    if (k + 1 < n) out = concat(out, SpaceTuple{{"mem" + std::to_string(k + 1), memory_dim}});
    const std::size_t need = (in.total_dim() + out.total_dim() - 1) / out.total_dim();
    auto ks = kraus_channel(in.total_dim(), out.total_dim(), std::max(n_kraus, need), rng);
    ops.push_back(choi_of_kraus(ks, in, out).choi());
  }
  return ops;
}

/// Deterministic comb of a random memory channel.
inline Comb comb(const std::vector<Tooth>& teeth, Rng& rng, std::size_t memory_dim = 2,
                 std::size_t n_kraus = 2) {
  auto ops = memory_channel_chois(teeth, memory_dim, n_kraus, rng);
  Operator op = align(link_chain(ops), comb_spaces(teeth));
  return Comb(teeth, std::move(op));
}

/// Random Hermitian matrix with entries of order one.
inline Mat hermitian(std::size_t d, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(d);
  const Mat g = ginibre(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace qcomb::random
