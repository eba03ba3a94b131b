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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qcomb/tester.hpp"
#include "scenarios.hpp"

using namespace qcomb;

namespace {

Mat pauli(int k) {
  Mat p = Mat::Zero(2, 2);
  switch (k) {
    case 0: p = Mat::Identity(2, 2); break;
    case 1: p(0, 1) = p(1, 0) = 1.0; break;
    case 2: p(0, 1) = cplx(0, -1); p(1, 0) = cplx(0, 1); break;
    default: p(0, 0) = 1.0; p(1, 1) = -1.0;
  }
  return p;
}

std::vector<Mat> tetrahedral_povm() {
  const double s2 = std::sqrt(2.0), s23 = std::sqrt(2.0 / 3.0);
  const double n[4][3] = {{0, 0, 1}, {2 * s2 / 3, 0, -1.0 / 3}, {-s2 / 3, s23, -1.0 / 3},
                          {-s2 / 3, -s23, -1.0 / 3}};
  std::vector<Mat> out;
  for (const auto& v : n) {
    Mat e = pauli(0);
    for (int k = 0; k < 3; ++k) e += v[k] * pauli(k + 1);
    out.push_back(e / 4.0);
  }
  return out;
}

/// Rank of the Gram matrix Tr[E_i^dagger E_j].
std::size_t gram_rank(const std::vector<Operator>& es) {
  const auto n = static_cast<Eigen::Index>(es.size());
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = (es[i].matrix().adjoint() * align(es[j], es[i].spaces()).matrix()).trace();
  Eigen::SelfAdjointEigenSolver<Mat> es_(g);
  const double top = es_.eigenvalues().cwiseAbs().maxCoeff();
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < n; ++i) r += es_.eigenvalues()(i) > 1e-10 * top;
  return r;
}

const SpaceTuple kIn{{"in", 2}}, kOut{{"out", 2}};
const std::vector<Tooth> kChannel{{kIn, kOut}};

Operator bell() { return double_ket(Mat::Identity(2, 2), kIn, kOut).projector(); }

}  // namespace

TEST(Tester, PovmOnAStateIsAZerothOrderTester) {
  const SpaceTuple s{{"s", 2}};
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  Tester t{{{SpaceTuple{}, s}}, {Operator(s, p0), Operator(s, p1)}};
  auto rep = validate_tester(t);
  ASSERT_TRUE(rep.ok);
  Mat plus = Mat::Constant(2, 2, 0.5);
  auto p = born(t, Operator(s, plus));
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(Tester, MaximallyEntangledProbe) {
  // T = I (x) I/2 needs the elements {1/4 |I>><<I|, I/2 - 1/4 |I>><<I|}
  Operator e0 = 0.25 * bell();
  Operator e1 = 0.5 * Operator::identity(e0.spaces()) - e0;
  Tester t{kChannel, {e0, e1}};
  auto rep = validate_tester(t);
  ASSERT_TRUE(rep.ok);
  EXPECT_LT(max_abs_diff(*rep.theta, 0.5 * Operator::identity(kIn)), 1e-15);
  // on the identity channel the entangled outcome is certain
  auto p = born(t, bell());
  EXPECT_NEAR(p[0], 1.0, 1e-14);
  EXPECT_NEAR(p[1], 0.0, 1e-14);
  // coherent part of the realization: the channel on |I>>/sqrt 2
  random::Rng rng(301);
  auto ch = choi_of_kraus(random::kraus_channel(2, 2, 2, rng), kIn, kOut).choi();
  auto real = realize_tester(t);
  Operator rho = real.coherent(ch);
  EXPECT_LT(max_abs_diff(rho, 0.5 * ch), 1e-12);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
}

TEST(Tester, UnnormalizedElementsAreRejected) {
  // {1/2 |I>><<I|, I - 1/2 |I>><<I|} sums to I (x) I, whose theta has trace 2
  Operator e0 = 0.5 * bell();
  Tester t{kChannel, {e0, Operator::identity(e0.spaces()) - e0}};
  auto rep = validate_tester(t);
  EXPECT_FALSE(rep.ok);
  EXPECT_FALSE(rep.bad_element.has_value());
  EXPECT_EQ(rep.level, 1u);
  EXPECT_THROW(rep.raise(), InvalidTester);
  Tester neg{kChannel, {-1.0 * e0}};
  auto r2 = validate_tester(neg);
  ASSERT_TRUE(r2.bad_element.has_value());
  EXPECT_EQ(*r2.bad_element, 0u);
}

TEST(Tester, BornSpaceMismatch) {
  Operator e = 0.25 * bell();
  EXPECT_THROW(born(e, Operator::identity(SpaceTuple{{"x", 2}, {"y", 2}})), SpaceMismatch);
}

TEST(TesterProperty, BornMatchesCircuitSimulation) {
  random::Rng rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
    const std::size_t anc = trial % 3 == 0 ? 1 : 2;
    auto ex = scenario::experiment(n, anc, 3, rng);
    ASSERT_TRUE(validate_tester(ex.tester).ok) << trial;
    auto p = born(ex.tester, ex.comb.op());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_GE(p[i], -1e-9);
      EXPECT_NEAR(p[i], ex.oracle[i], 1e-9);
      sum += p[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(TesterProperty, RealizationIsExactIncludingRankDeficientT) {
  random::Rng rng(307);
  int deficient = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
    const std::size_t anc = trial % 2 == 0 ? 1 : 2;
    auto ex = scenario::experiment(n, anc, 2 + static_cast<std::size_t>(trial % 3), rng);
    const Operator t = ex.tester.normalization();
    if (rank(t) < t.dim()) ++deficient;
    auto real = realize_tester(ex.tester);
    Operator sum = Operator(t.spaces(), Mat::Zero(t.matrix().rows(), t.matrix().cols()));
    for (const auto& p : real.povm) {
      EXPECT_TRUE(is_psd(p, 1e-9));
      sum += p;
    }
    EXPECT_LT(max_abs_diff(sum, Operator::identity(t.spaces())), 1e-9);
    for (int r = 0; r < 3; ++r) {
      Comb c = random::comb(ex.comb.teeth(), rng);
      Operator rho = real.coherent(c.op());
      EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
      for (std::size_t i = 0; i < real.povm.size(); ++i) {
        const double direct = born(ex.tester.elements[i], c.op());
        const double split = (real.povm[i].matrix().transpose() * rho.matrix()).trace().real();
        EXPECT_NEAR(direct, split, 1e-10);
      }
    }
  }
  EXPECT_GT(deficient, 0);
}

TEST(TesterProperty, FullRankNeedsNoCompletion) {
  random::Rng rng(311);
  auto ex = scenario::experiment(1, 2, 3, rng);
  const Operator t = ex.tester.normalization();
  ASSERT_EQ(rank(t), t.dim());
  auto real = realize_tester(ex.tester);
  const Mat root = real.sqrt_t_transpose.matrix().transpose();
  for (std::size_t i = 0; i < real.povm.size(); ++i) {
    // sqrt(T) P~ sqrt(T) gives back P_i when Q_i = 0
    const Mat back = root * real.povm[i].matrix() * root;
    EXPECT_LT(linalg::max_abs(back - align(ex.tester.elements[i], t.spaces()).matrix()), 1e-10);
  }
}

TEST(InfoComplete, SicTesterOnQubitStates) {
  const SpaceTuple s{{"s", 2}};
  std::vector<Operator> base;
  for (const auto& e : tetrahedral_povm()) base.emplace_back(s, e);
  EXPECT_EQ(gram_rank(base), 4u);
  auto t = info_complete_tester(base, {{SpaceTuple{}, s}});
  EXPECT_EQ(t.elements.size(), 4u);
  EXPECT_TRUE(validate_tester(t).ok);
  EXPECT_EQ(tester_span_dim(t), 4u);
  EXPECT_TRUE(is_info_complete(t));
  EXPECT_TRUE(is_info_complete_deterministic(t));
}

TEST(InfoComplete, ProductBasisTesterOnQubitChannels) {
  const SpaceTuple all = comb_spaces(kChannel);
  std::vector<Operator> base;
  for (const auto& a : tetrahedral_povm())
    for (const auto& b : tetrahedral_povm()) base.emplace_back(all, oracle::kron(a, b));
  EXPECT_EQ(gram_rank(base), 16u);
  auto t = info_complete_tester(base, kChannel);
  ASSERT_EQ(t.elements.size(), 16u);
  EXPECT_LT(max_abs_diff(t.elements[5], 0.5 * base[5]), 1e-15);
  auto rep = validate_tester(t);
  ASSERT_TRUE(rep.ok);
  EXPECT_EQ(gram_rank(t.elements), 16u);
  EXPECT_TRUE(is_info_complete(t));
  EXPECT_TRUE(is_info_complete_deterministic(t));
  EXPECT_GT(linalg::min_eigenvalue(rep.theta->matrix()), 0.0);
}

TEST(InfoComplete, IncompleteBases) {
  const SpaceTuple s{{"s", 2}};
  Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 0.5;
  std::vector<Operator> three{Operator(s, p0), Operator(s, p1), Operator(s, p1)};
  EXPECT_THROW(info_complete_tester(three, {{SpaceTuple{}, s}}), BaseNotComplete);
  std::vector<Operator> unnormalized{Operator(s, p0)};
  EXPECT_THROW(info_complete_tester(unnormalized, {{SpaceTuple{}, s}}), InvalidTester);

  Operator e0 = 0.25 * bell();
  Tester two{kChannel, {e0, 0.5 * Operator::identity(e0.spaces()) - e0}};
  EXPECT_FALSE(is_info_complete(two));
  EXPECT_FALSE(is_info_complete_deterministic(two));
}

TEST(InfoComplete, DeterministicOnlyCompleteness) {
  // span{I(x)I, s_a(x)s_b, s_a(x)I} on (in, out): everything except I(x)s_b on
  // the output side, i.e. exactly the operators with Tr_out X proportional to I
  const SpaceTuple all = comb_spaces(kChannel);
  std::vector<Operator> el;
  const Mat id = oracle::kron(pauli(0), pauli(0));
  for (double sg : {1.0, -1.0}) {
    for (int a = 1; a <= 3; ++a) {
      el.emplace_back(all, (id + sg * oracle::kron(pauli(0), pauli(a))) / 48.0);
      for (int b = 1; b <= 3; ++b) {
        el.emplace_back(all, (id + sg * oracle::kron(pauli(a), pauli(b))) / 48.0);
      }
    }
  }
  Tester t{kChannel, el};
  ASSERT_TRUE(validate_tester(t).ok);
  EXPECT_EQ(tester_span_dim(t), 13u);
  EXPECT_FALSE(is_info_complete(t));
  EXPECT_TRUE(is_info_complete_deterministic(t));
}

TEST(InfoComplete, FactorizationRecoversBasePovm) {
  random::Rng rng(313);
  const SpaceTuple all = comb_spaces(kChannel);
  const Mat theta = random::density(2, rng);
  const Mat root = linalg::psd_sqrt(theta);
  // spaces are (in, out); theta lives on in
  const Mat w = oracle::kron(root, Mat::Identity(2, 2));
  std::vector<Operator> base;
  std::vector<Operator> el;
  for (const auto& a : tetrahedral_povm()) {
    for (const auto& b : tetrahedral_povm()) {
      base.emplace_back(all, oracle::kron(a, b));
      el.emplace_back(all, w * oracle::kron(a, b) * w);
    }
  }
  Tester t{kChannel, el};
  auto rep = validate_tester(t);
  ASSERT_TRUE(rep.ok);
  EXPECT_LT(linalg::max_abs(rep.theta->matrix() - theta), 1e-12);
  auto f = factorize_info_complete(t);
  EXPECT_LT(linalg::max_abs(f.theta_root.matrix() - root), 1e-10);
  Operator sum = Operator(all, Mat::Zero(4, 4));
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_LT(max_abs_diff(f.base_povm[i], base[i]), 1e-10);
    sum += f.base_povm[i];
  }
  EXPECT_LT(max_abs_diff(sum, Operator::identity(all)), 1e-10);
  EXPECT_EQ(gram_rank(f.base_povm), 16u);
}

TEST(InfoComplete, SingularThetaIsReported) {
  const SpaceTuple all = comb_spaces(kChannel);
  Mat zero = Mat::Zero(2, 2);
  zero(0, 0) = 1.0;
  std::vector<Operator> el;
  for (const auto& e : tetrahedral_povm()) el.emplace_back(all, oracle::kron(zero, e));
  Tester t{kChannel, el};
  ASSERT_TRUE(validate_tester(t).ok);
  EXPECT_FALSE(is_info_complete(t));
  EXPECT_THROW(factorize_info_complete(t), ThetaSingular);
}
