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

// Acceptance checks.  Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qcomb/qcomb.hpp"
#include "scenarios.hpp"

using namespace qcomb;

namespace {

/// Accumulates the worst observed value of each checked quantity.
struct Check {
  bool ok = true;
  std::string detail;

  void le(const char* what, double value, double bound) {
    if (!(value <= bound)) {
      ok = false;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%s=%.3g exceeds %.3g; ", what, value, bound);
      detail += buf;
    }
  }
  void that(const char* what, bool cond) {
    if (!cond) {
      ok = false;
      detail += std::string(what) + " failed; ";
    }
  }
  void note(const char* fmt, double x) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), fmt, x);
    detail += buf;
  }
};

Operator random_op(const SpaceTuple& t, random::Rng& rng) {
  const auto d = static_cast<Eigen::Index>(t.total_dim());
  return Operator(t, random::ginibre(d, d, rng));
}

SpaceTuple random_tuple(random::Rng& rng, const std::vector<std::string>& pool) {
  std::vector<Space> s;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    if (rng() % 2) s.push_back({pool[k], 1 + k % 3});
  }
  std::shuffle(s.begin(), s.end(), rng);
  return SpaceTuple(s);
}

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

// ------------------------------------------------------------------ 1

Check link_algebra() {
  Check c;
  random::Rng rng(1001);
  const std::vector<std::string> pool{"a", "b", "c", "d", "e", "f"};
  double swap = 0, assoc = 0;
  bool herm = true, psd = true;
  for (int trial = 0; trial < 200; ++trial) {
    Operator n = random_op(random_tuple(rng, pool), rng);
    Operator m = random_op(random_tuple(rng, pool), rng);
    swap = std::max(swap, max_abs_diff(link(n, m), link(m, n)));

    SpaceTuple t1, t2, t3;
    do {
      t1 = random_tuple(rng, pool);
      t2 = random_tuple(rng, pool);
      t3 = random_tuple(rng, pool);
    } while (!intersect(intersect(t1, t2), t3).empty());
    Operator m1 = random_op(t1, rng), m2 = random_op(t2, rng), m3 = random_op(t3, rng);
    assoc = std::max(assoc, max_abs_diff(link(m1, link(m2, m3)), link(link(m1, m2), m3)));

    Operator h1(t1, random::hermitian(t1.total_dim(), rng));
    Operator h2(t2, random::hermitian(t2.total_dim(), rng));
    herm = herm && is_hermitian(link(h1, h2), 1e-10);
    Operator p1(t1, random::density(t1.total_dim(), rng));
    Operator p2(t2, random::density(t2.total_dim(), rng));
    psd = psd && is_psd(link(p1, p2), 1e-10);
  }
  c.le("swap", swap, 1e-10);
  c.le("assoc", assoc, 1e-10);
  c.that("hermiticity", herm);
  c.that("positivity", psd);
  c.note("200 pairs and triples, max deviation %.2g", std::max(swap, assoc));
  return c;
}

// ------------------------------------------------------------------ 2

Check choi_calculus() {
  Check c;
  random::Rng rng(1002);
  double round = 0, tp_marg = 0, non_tp_min = 1e9;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t di = 1 + trial % 3, dout = 1 + (trial / 3) % 3;
    const SpaceTuple in{{"in", di}}, out{{"out", dout}};
    const std::size_t nk = std::max<std::size_t>(1 + trial % 4, (di + dout - 1) / dout);
    auto ks = random::kraus_channel(di, dout, nk, rng);
    MapAction f = [&](const Mat& x) {
      Mat y = Mat::Zero(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(dout));
      for (const auto& k : ks) y += k * x * k.adjoint();
      return y;
    };
    auto v = choi_of_map(f, in, out);
    const auto d = static_cast<Eigen::Index>(di);
    const Mat x = random::ginibre(d, d, rng);
    round = std::max(round, linalg::max_abs(apply_map(v, x) - f(x)));
    tp_marg = std::max(tp_marg, max_abs_diff(partial_trace(v.choi(), {"out"}), Operator::identity(in)));

    // the converse: shrinking one Kraus operator breaks both sides
    auto shrunk = ks;
    shrunk[0] *= 0.9;
    auto w = choi_of_kraus(shrunk, in, out);
    Mat s = Mat::Zero(d, d);
    for (const auto& k : shrunk) s += k.adjoint() * k;
    const double defect = linalg::max_abs(s - Mat::Identity(d, d));
    const double marg = max_abs_diff(partial_trace(w.choi(), {"out"}), Operator::identity(in));
    if (defect > 1e-6) non_tp_min = std::min(non_tp_min, marg);
  }
  c.le("roundtrip", round, 1e-10);
  c.le("tp_marginal", tp_marg, 1e-10);
  c.that("non-TP maps have non-identity marginal", non_tp_min > 1e-6);
  c.note("100 maps, roundtrip %.2g", round);
  return c;
}

// ------------------------------------------------------------------ 3

Operator perturbation(const std::vector<Tooth>& teeth, double eps) {
  const SpaceTuple all = comb_spaces(teeth);
  const std::string hot = teeth.back().in[0].label;
  Mat m = Mat::Ones(1, 1);
  for (const auto& s : all) {
    Mat f = Mat::Zero(static_cast<Eigen::Index>(s.dim), static_cast<Eigen::Index>(s.dim));
    if (s.label == hot) {
      f = pauli(3);
    } else {
      f(0, 0) = 1.0;
    }
    m = oracle::kron(m, f);
  }
  return Operator(all, eps * m);
}

Check comb_validation() {
  Check c;
  random::Rng rng(1003);
  const double eps = 1e-3;
  int passed = 0, caught = 0;
  double min_res = 1e9;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 4);
    auto teeth = random::simple_teeth(n);
    auto comb = random::comb(teeth, rng, 2, 1 + static_cast<std::size_t>(trial % 3));
    passed += validate_deterministic(comb).ok;
    auto bad = validate_deterministic(comb.op() + perturbation(teeth, eps), teeth);
    if (!bad.ok) {
      ++caught;
      min_res = std::min(min_res, bad.residual);
    }
  }
  c.that("all networks validate", passed == 100);
  c.that("all perturbations rejected", caught == 100);
  c.le("-min_residual", -min_res, -5e-4);
  c.note("100 networks, min perturbed residual %.3g", min_res);
  return c;
}

// ------------------------------------------------------------------ 4

Check realization() {
  Check c;
  random::Rng rng(1004);
  double rec = 0, iso = 0;
  bool anc = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    auto comb = random::comb(random::simple_teeth(n), rng, 1 + trial % 3, 1 + trial % 2);
    auto seq = realize_comb(comb);
    rec = std::max(rec, max_abs_diff(recompose(seq), comb.op()));
    const auto red = validate_deterministic(comb).reduced;
    for (std::size_t j = 0; j < seq.steps.size(); ++j) {
      const Mat& v = seq.steps[j];
      iso = std::max(iso, linalg::max_abs(v.adjoint() * v - Mat::Identity(v.cols(), v.cols())));
      anc = anc && seq.ancilla_dims[j + 1] <= rank(red[j + 1]);
    }
  }
  c.le("recompose", rec, 1e-8);
  c.le("isometry", iso, 1e-9);
  c.that("ancilla dims bounded by rank", anc);
  c.note("50 combs, recompose error %.2g", rec);
  return c;
}

// ------------------------------------------------------------------ 5

Check born_rule() {
  Check c;
  random::Rng rng(1005);
  double neg = 0, sum_dev = 0, oracle_dev = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
    const std::size_t anc = trial % 3 == 0 ? 1 : 2;
    auto ex = scenario::experiment(n, anc, 2 + static_cast<std::size_t>(trial % 3), rng);
    c.that("tester valid", validate_tester(ex.tester).ok);
    const auto p = born(ex.tester, ex.comb.op());
    double sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      neg = std::max(neg, -p[i]);
      oracle_dev = std::max(oracle_dev, std::abs(p[i] - ex.oracle[i]));
      sum += p[i];
    }
    sum_dev = std::max(sum_dev, std::abs(sum - 1.0));
  }
  c.le("negativity", neg, 1e-9);
  c.le("sum", sum_dev, 1e-9);
  c.le("oracle", oracle_dev, 1e-9);
  c.note("100 pairs, oracle deviation %.2g", oracle_dev);
  return c;
}

// ------------------------------------------------------------------ 6

Check tester_factorization() {
  Check c;
  random::Rng rng(1006);
  double dev = 0;
  int deficient = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
    const std::size_t anc = trial % 2 == 0 ? 1 : 2;
    auto ex = scenario::experiment(n, anc, 2 + static_cast<std::size_t>(trial % 3), rng);
    const Operator t = ex.tester.normalization();
    if (rank(t) < t.dim()) ++deficient;
    auto real = realize_tester(ex.tester);
    const Comb r = random::comb(ex.comb.teeth(), rng);
    const Operator rho = real.coherent(r.op());
    for (std::size_t i = 0; i < real.povm.size(); ++i) {
      const double direct = born(ex.tester.elements[i], r.op());
      const double split = (real.povm[i].matrix().transpose() * rho.matrix()).trace().real();
      dev = std::max(dev, std::abs(direct - split));
    }
  }
  c.le("deviation", dev, 1e-10);
  c.that("rank-deficient T present", deficient > 0);
  c.note("100 instances, deviation %.2g", dev);
  return c;
}

// ------------------------------------------------------------------ 7

std::vector<Mat> depolarizing(double p) {
  return {std::sqrt(1 - 3 * p / 4) * pauli(0), std::sqrt(p / 4) * pauli(1),
          std::sqrt(p / 4) * pauli(2), std::sqrt(p / 4) * pauli(3)};
}

Check discrimination() {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  const SpaceTuple in{{"in", 2}}, out{{"out", 2}};
  auto channel = [&](const std::vector<Mat>& ks) {
    return Comb({{in, out}}, choi_of_kraus(ks, in, out).choi());
  };
  double mono = 0, repro = 0;
  auto consistent = [&](const DiscriminationResult& r, const Comb& a, const Comb& b) {
    for (std::size_t k = 1; k < r.trace.size(); ++k) mono = std::max(mono, r.trace[k - 1] - r.trace[k]);
    const double pe = 0.5 * born(r.tester.elements[1], a.op()) + 0.5 * born(r.tester.elements[0], b.op());
    repro = std::max(repro, std::abs(pe - r.p_error));
  };

  const Comb id = channel({pauli(0)});
  const Comb flip = channel({pauli(1)});
  auto r1 = comb_distance(id, flip);
  consistent(r1, id, flip);
  c.le("|d(id,X)-1|", std::abs(r1.distance - 1.0), 1e-6);

  random::Rng rng(1007);
  const Comb two = random::comb(random::simple_teeth(2), rng);
  auto r2 = comb_distance(two, two);
  consistent(r2, two, two);
  c.le("d(R,R)", r2.distance, 1e-8);

  const SpaceTuple oi = concat(out, in);
  double grid_dev = 0;
  for (double p : {1.0, 0.5, 0.2}) {
    const Comb dep = channel(depolarizing(p));
    auto r = comb_distance(id, dep);
    consistent(r, id, dep);
    const Mat delta = align(id.op(), oi).matrix() - align(dep.op(), oi).matrix();
    grid_dev = std::max(grid_dev, std::abs(r.distance - oracle::cb_distance_qubit_grid(delta, 2)));
  }
  c.le("grid", grid_dev, 1e-4);
  c.le("objective decrease", mono, 1e-9);
  c.le("p_error reproduction", repro, 1e-9);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.le("seconds", secs, 60.0);
  c.note("grid deviation %.2g, ", grid_dev);
  c.note("%.1f s", secs);
  return c;
}

// ------------------------------------------------------------------ 8

Check multitime() {
  Check c;
  const double h = 1.0 / std::sqrt(2.0);
  Vec plus(2), minus(2);
  plus << h, h;
  minus << h, -h;
  MultiTimeState s;
  s.psi0 = plus;
  s.middle = {{minus, plus}};
  s.phiN = minus;
  const auto m = sigma_x_difference_instrument();
  const auto p = history_probabilities(m, s);
  c.le("|p(+2)-1|", std::abs(p[0] - 1.0), 1e-10);
  c.le("p(-2)", std::abs(p[1]), 1e-10);
  c.le("p(0)", std::abs(p[2]), 1e-10);

  random::Rng rng(1008);
  double dev = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    auto mm = scenario::random_measurement(n, 2 + static_cast<std::size_t>(trial % 2), rng);
    auto ss = scenario::random_state(n, rng);
    const auto q = history_probabilities(mm, ss);
    const auto a = scenario::amplitude_form(mm, ss);
    for (std::size_t i = 0; i < q.size(); ++i) dev = std::max(dev, std::abs(q[i] - a[i]));
  }
  c.le("comb vs amplitude", dev, 1e-10);
  c.note("p = (%.12g, ", p[0]);
  c.note("%.2g, ", p[1]);
  c.note("%.2g), ", p[2]);
  c.note("100 instances agree to %.2g", dev);
  return c;
}

// ------------------------------------------------------------------ 9

Check informational_completeness() {
  Check c;
  const double s2 = std::sqrt(2.0), s23 = std::sqrt(2.0 / 3.0);
  const double dirs[4][3] = {{0, 0, 1}, {2 * s2 / 3, 0, -1.0 / 3}, {-s2 / 3, s23, -1.0 / 3},
                             {-s2 / 3, -s23, -1.0 / 3}};
  std::vector<Mat> sic;
  for (const auto& v : dirs) {
    Mat e = pauli(0);
    for (int k = 0; k < 3; ++k) e += v[k] * pauli(k + 1);
    sic.push_back(e / 4.0);
  }
  const SpaceTuple in{{"in", 2}}, out{{"out", 2}};
  const std::vector<Tooth> teeth{{in, out}};
  const SpaceTuple all = comb_spaces(teeth);
  std::vector<Operator> base;
  for (const auto& a : sic)
    for (const auto& b : sic) base.emplace_back(all, oracle::kron(a, b));
  const Tester t = info_complete_tester(base, teeth);
  const auto rep = validate_tester(t);
  c.that("tester valid", rep.ok);
  const std::size_t span = tester_span_dim(t);
  c.that("span rank 16", span == 16);
  const double lmin = rep.theta ? linalg::min_eigenvalue(rep.theta->matrix()) : -1.0;
  c.that("theta invertible", lmin > 0.0);
  c.note("span %.0f, ", static_cast<double>(span));
  c.note("min eig(Theta) %.3g", lmin);
  return c;
}

// ------------------------------------------------------------------ 10

Check s_i_fixture() {
  Check c;
  const auto q = [](const std::string& l) { return Space{l, 2}; };
  const std::vector<Tooth> teeth{{SpaceTuple{q("0")}, SpaceTuple{q("1")}},
                                 {SpaceTuple{q("2")}, SpaceTuple{q("3")}}};
  const SpaceTuple all = comb_spaces(teeth);
  const Operator bi = double_ket(pauli(0), SpaceTuple{q("3")}, SpaceTuple{q("1")}).projector();
  const Operator bx = double_ket(pauli(1), SpaceTuple{q("3")}, SpaceTuple{q("1")}).projector();
  Mat pm = Mat::Zero(4, 4);
  pm(3, 3) = 1.0;
  const SpaceTuple s02{q("0"), q("2")};
  const Operator p(s02, pm), ip(s02, Mat::Identity(4, 4) - pm);
  const Operator r = 0.5 * align(tensor(bi, ip), all) + 0.5 * align(tensor(bx, p), all);
  c.that("order (0,1)", validate_deterministic(r, teeth).ok);
  c.that("order (1,0)", validate_deterministic(r, {teeth[1], teeth[0]}).ok);
  c.that("membership", s_i_membership(r, teeth, {{0, 1}}));
  c.detail += c.ok ? "R validates in both orders and lies in S_I" : "";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"link-product algebra", link_algebra},
      {"choi calculus", choi_calculus},
      {"comb validation soundness", comb_validation},
      {"realization roundtrip", realization},
      {"born-rule consistency", born_rule},
      {"tester factorization", tester_factorization},
      {"discrimination values", discrimination},
      {"multi-time sigma_x example", multitime},
      {"informational completeness", informational_completeness},
      {"S_I fixture", s_i_fixture},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Check c;
    try {
      c = criteria[k].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    failed += !c.ok;
    std::printf("%s %2zu %s: %s\n", c.ok ? "PASS" : "FAIL", k + 1, criteria[k].first,
                c.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
