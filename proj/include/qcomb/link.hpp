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

#include <map>
#include <string>
#include <vector>

#include "qcomb/operator.hpp"

namespace qcomb {

/// Link product N * M = Tr_S[(I (x) M^{T_S})(N (x) I)] over the shared
/// labels S.  The result lists N-only labels first, then M-only labels.
///
/// The contraction is done as one matrix product: with N-only factors a,
/// shared s, M-only b,
///   Nr[(a,a'),(t,s)] = N[(a,t),(a',s)],  Mr[(t,s),(b,b')] = M[(t,b),(s,b')]
/// and (N*M)[(a,b),(a',b')] = (Nr Mr)[(a,a'),(b,b')].
inline Operator link(const Operator& n, const Operator& m) {
  const SpaceTuple shared = intersect(n.spaces(), m.spaces());
  const SpaceTuple a = difference(n.spaces(), shared);
  const SpaceTuple b = difference(m.spaces(), shared);

  std::vector<std::string> n_order = a.labels();
  for (const auto& l : shared.labels()) n_order.push_back(l);
  std::vector<std::string> m_order = shared.labels();
  for (const auto& l : b.labels()) m_order.push_back(l);
  const Operator np = permute(n, n_order);
  const Operator mp = permute(m, m_order);

  const auto da = static_cast<Eigen::Index>(a.total_dim());
  const auto db = static_cast<Eigen::Index>(b.total_dim());
  const auto ds = static_cast<Eigen::Index>(shared.total_dim());

  Mat nr(da * da, ds * ds);
  for (Eigen::Index ap = 0; ap < da; ++ap) {
    for (Eigen::Index s = 0; s < ds; ++s) {
      for (Eigen::Index aa = 0; aa < da; ++aa) {
        for (Eigen::Index t = 0; t < ds; ++t) {
          nr(aa * da + ap, t * ds + s) = np.matrix()(aa * ds + t, ap * ds + s);
        }
      }
    }
  }
  Mat mr(ds * ds, db * db);
  for (Eigen::Index bp = 0; bp < db; ++bp) {
    for (Eigen::Index s = 0; s < ds; ++s) {
      for (Eigen::Index bb = 0; bb < db; ++bb) {
        for (Eigen::Index t = 0; t < ds; ++t) {
          mr(t * ds + s, bb * db + bp) = mp.matrix()(t * db + bb, s * db + bp);
        }
      }
    }
  }
  const Mat r = nr * mr;

  Mat out(da * db, da * db);
  for (Eigen::Index ap = 0; ap < da; ++ap) {
    for (Eigen::Index bp = 0; bp < db; ++bp) {
      for (Eigen::Index aa = 0; aa < da; ++aa) {
        for (Eigen::Index bb = 0; bb < db; ++bb) {
          out(aa * db + bb, ap * db + bp) = r(aa * da + ap, bb * db + bp);
        }
      }
    }
  }
  return Operator(concat(a, b), std::move(out));
}

/// Left fold of link over `ops`.  Every label may occur in at most two
/// operands.
inline Operator link_chain(const std::vector<Operator>& ops) {
  std::map<std::string, int> uses;
  for (const auto& o : ops) {
    for (const auto& s : o.spaces()) {
      if (++uses[s.label] > 2) {
        throw LabelUsedThrice("label '" + s.label + "' occurs in three operands");
      }
    }
  }
  if (ops.empty()) return Operator::scalar(1.0);
  Operator acc = ops.front();
  for (std::size_t i = 1; i < ops.size(); ++i) acc = link(acc, ops[i]);
  return acc;
}

}  // namespace qcomb
