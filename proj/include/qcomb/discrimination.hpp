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
#include <cstdint>
#include <future>
#include <random>
#include <utility>
#include <vector>

#include "qcomb/comb.hpp"
#include "qcomb/tester.hpp"

namespace qcomb {

struct HelstromResult {
  Mat p0;  // guess "0"
  Mat p1;  // guess "1"
  double p_error = 0.0;
};

/// Optimal two-outcome measurement for pi0 rho0 vs pi1 rho1.  The
/// inputs need not be normalized; p_error is pi0 Tr[rho0 p1] + pi1 Tr[rho1 p0].
inline HelstromResult helstrom(const Mat& rho0, const Mat& rho1, double pi0 = 0.5,
                               double pi1 = 0.5) {
  const Mat gamma = pi0 * rho0 - pi1 * rho1;
  auto e = linalg::eigh(gamma);
  RVec pos = e.values.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
  HelstromResult out;
  out.p0 = linalg::from_eigen(e, pos);
  out.p1 = Mat::Identity(gamma.rows(), gamma.cols()) - out.p0;
  out.p_error = (pi0 * (rho0 * out.p1).trace().real() +
                 pi1 * (rho1 * out.p0).trace().real());
  return out;
}

struct DiscriminationConfig {
  std::size_t max_iter = 300;
  std::size_t restarts = 8;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

struct DiscriminationResult {
  double p_error = 0.5;
  double distance = 0.0;  // at equal priors
  Tester tester;          // {P0, P1}, P0 guessing R0
  std::vector<double> trace;  // objective ||sqrt(T)^T Gamma sqrt(T)^T||_1 per accepted step
  std::size_t iterations = 0;
  bool converged = true;
};

namespace detail {

struct SeesawRun {
  double objective = -1.0;  // trace norm at the best T
  Operator t;
  std::vector<double> trace;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Makes a Hermitian operator an exact tester normalization: affine
/// projection followed by the least mixing with the flat normalization that
/// restores positivity.
inline Operator make_feasible(const HierarchyProjector& proj, const Operator& x) {
  Operator t = proj.project(Operator(proj.spaces(), linalg::hermitize(align(x, proj.spaces()).matrix())));
  const double lmin = linalg::min_eigenvalue(t.matrix());
  if (lmin >= 0.0) return t;
  const Operator& j = proj.anchor();
  const double c = j.matrix()(0, 0).real();
  const double s = -lmin / (c - lmin);
  return (1.0 - s) * t + s * j;
}

inline double objective(const Mat& gamma, const Mat& t) {
  const Mat r = linalg::psd_sqrt(t).transpose();
  return linalg::trace_norm_hermitian(r * gamma * r);
}

/// Exact projection of the pair (a, b) onto {a + b in the affine set}.
inline std::pair<Mat, Mat> affine_pair(const HierarchyProjector& proj, const Mat& a,
                                       const Mat& b) {
  const Operator sum(proj.spaces(), a + b);
  const Mat delta = 0.5 * (proj.project(sum).matrix() - sum.matrix());
  return {a + delta, b + delta};
}

inline Mat random_psd(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const auto dd = static_cast<Eigen::Index>(d);
  Mat g(dd, dd);
  for (Eigen::Index i = 0; i < dd; ++i) {
    for (Eigen::Index j = 0; j < dd; ++j) g(i, j) = cplx(n(rng), n(rng));
  }
  Mat p = g * g.adjoint();
  return p / p.trace().real();
}

/// One seesaw instance maximizing ||sqrt(T)^T Gamma sqrt(T)^T||_1 over
/// tester normalizations T.  The inner loop is ADMM on the (convex) problem
/// of maximizing pi0 Tr[P0^T R0] + pi1 Tr[P1^T R1] over tester pairs, split as
/// a PSD pair X and an affine pair Y.  Every `inner` sweeps the normalization
/// of Y is made exactly feasible, the Helstrom tester at it is evaluated, and
/// it replaces the incumbent only if the objective improves.
inline SeesawRun seesaw(const HierarchyProjector& proj, const Mat& r0, const Mat& r1,
                        double pi0, double pi1, Operator t0,
                        const DiscriminationConfig& cfg, std::size_t inner = 20) {
  SeesawRun run;
  const Mat gamma = pi0 * r0 - pi1 * r1;
  const Mat g0 = pi0 * r0.transpose();
  const Mat g1 = pi1 * r1.transpose();
  run.t = std::move(t0);
  run.objective = objective(gamma, run.t.matrix());
  run.trace.push_back(run.objective);

  // start from the Helstrom tester at t0
  const Mat root = linalg::psd_sqrt(run.t.matrix());
  const Mat rt = root.transpose();
  const auto h = helstrom(rt * r0 * rt, rt * r1 * rt, pi0, pi1);
  Mat y0 = root * h.p0.transpose() * root, y1 = root * h.p1.transpose() * root;
  const Eigen::Index d = y0.rows();
  Mat u0 = Mat::Zero(d, d), u1 = u0;
  double rho = std::max(linalg::max_abs(g0), linalg::max_abs(g1)) /
               std::max(linalg::max_abs(run.t.matrix()), 1e-300);
  std::size_t stall = 0;
  for (std::size_t it = 0; it < cfg.max_iter; ++it) {
    run.iterations = it + 1;
    double r_primal = 0.0, r_dual = 0.0;
    for (std::size_t k = 0; k < inner; ++k) {
      const Mat x0 = linalg::psd_part(y0 - u0 + g0 / rho);
      const Mat x1 = linalg::psd_part(y1 - u1 + g1 / rho);
      auto [n0, n1] = affine_pair(proj, x0 + u0, x1 + u1);
      r_dual = rho * std::max(linalg::max_abs(n0 - y0), linalg::max_abs(n1 - y1));
      y0 = std::move(n0);
      y1 = std::move(n1);
      u0 += x0 - y0;
      u1 += x1 - y1;
      r_primal = std::max(linalg::max_abs(x0 - y0), linalg::max_abs(x1 - y1));
    }
    // residual balancing; the scaled duals follow rho
    if (r_primal > 10.0 * r_dual) {
      rho *= 2.0;
      u0 /= 2.0;
      u1 /= 2.0;
    } else if (r_dual > 10.0 * r_primal) {
      rho /= 2.0;
      u0 *= 2.0;
      u1 *= 2.0;
    }
    const Operator cand = make_feasible(proj, Operator(proj.spaces(), y0 + y1));
    const double val = objective(gamma, cand.matrix());
    if (val > run.objective + cfg.tol) {
      run.objective = val;
      run.t = cand;
      run.trace.push_back(val);
      stall = 0;
    } else {
      ++stall;
    }
    const double scale = linalg::max_abs(run.t.matrix());
    if ((r_primal < 1e-11 * scale && r_dual < 1e-11 * rho * scale) || stall >= 8) {
      run.converged = true;
      break;
    }
  }
  return run;
}

inline std::vector<SeesawRun> run_restarts(const HierarchyProjector& proj, const Mat& r0,
                                           const Mat& r1, double pi0, double pi1,
                                           const DiscriminationConfig& cfg) {
  const std::size_t k = std::max<std::size_t>(cfg.restarts, 1);
  std::vector<std::future<SeesawRun>> futs;
  for (std::size_t i = 0; i < k; ++i) {
    futs.push_back(std::async(std::launch::async, [&, i] {
      Operator start = proj.anchor();
      if (i > 0) {
        std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(i)};
        std::mt19937_64 rng(seq);
        const Mat w = random_psd(proj.spaces().total_dim(), rng);
        const double c = proj.anchor().matrix()(0, 0).real();
        const double scale = c * static_cast<double>(proj.spaces().total_dim());
        start = make_feasible(proj, Operator(proj.spaces(), proj.anchor().matrix() + scale * w));
      }
      return seesaw(proj, r0, r1, pi0, pi1, std::move(start), cfg);
    }));
  }
  std::vector<SeesawRun> out;
  for (auto& f : futs) out.push_back(f.get());
  return out;
}

inline const SeesawRun& best_run(const std::vector<SeesawRun>& runs) {
  return *std::max_element(runs.begin(), runs.end(), [](const auto& x, const auto& y) {
    return x.objective < y.objective;
  });
}

}  // namespace detail

/// Minimum-error discrimination of two deterministic combs with the same
/// teeth.  The returned tester attains the reported p_error; `distance` is the
/// value at equal priors.
inline DiscriminationResult comb_distance(const Comb& r0, const Comb& r1,
                                          std::pair<double, double> priors = {0.5, 0.5},
                                          const DiscriminationConfig& cfg = {}) {
  const auto [pi0, pi1] = priors;
  if (pi0 < 0.0 || pi1 < 0.0 || std::abs(pi0 + pi1 - 1.0) > 1e-12) {
    throw InvalidArgument("priors must be nonnegative and sum to 1");
  }
  const SpaceTuple s = comb_spaces(r0.teeth());
  if (!comb_spaces(r1.teeth()).same_labels(s) || r0.size() != r1.size()) {
    throw SpaceMismatch("combs have different teeth");
  }
  validate_deterministic(r0).raise();
  validate_deterministic(r1).raise();
  const HierarchyProjector proj(tester_teeth(r0.teeth()));
  const Mat m0 = align(r0.op(), proj.spaces()).matrix();
  const Mat m1 = align(r1.op(), proj.spaces()).matrix();

  const auto runs = detail::run_restarts(proj, m0, m1, pi0, pi1, cfg);
  const auto& best = detail::best_run(runs);

  DiscriminationResult res;
  res.trace = best.trace;
  res.iterations = best.iterations;
  res.converged = best.converged;
  const Mat root = linalg::psd_sqrt(best.t.matrix());
  const Mat rt = root.transpose();
  const auto h = helstrom(rt * m0 * rt, rt * m1 * rt, pi0, pi1);
  res.tester.teeth = r0.teeth();
  res.tester.elements = {Operator(proj.spaces(), root * h.p0.transpose() * root),
                         Operator(proj.spaces(), root * h.p1.transpose() * root)};
  res.p_error = pi0 * born(res.tester.elements[1], r0.op()) +
                pi1 * born(res.tester.elements[0], r1.op());
  if (std::abs(pi0 - 0.5) < 1e-15 && std::abs(pi1 - 0.5) < 1e-15) {
    res.distance = 1.0 - 2.0 * res.p_error;
  } else {
    const auto eq = detail::run_restarts(proj, m0, m1, 0.5, 0.5, cfg);
    res.distance = detail::best_run(eq).objective;
  }
  res.distance = std::clamp(res.distance, 0.0, 1.0);
  return res;
}

/// Value of the parallel scheme: every tooth collapsed into one channel from
/// all inputs to all outputs.  Bounded above by comb_distance.
inline DiscriminationResult parallel_distance(const Comb& r0, const Comb& r1,
                                              std::pair<double, double> priors = {0.5, 0.5},
                                              const DiscriminationConfig& cfg = {}) {
  auto collapse = [](const Comb& c) {
    Tooth t;
    for (const auto& x : c.teeth()) {
      t.in = concat(t.in, x.in);
      t.out = concat(t.out, x.out);
    }
    return Comb({t}, c.op(), c.kind());
  };
  return comb_distance(collapse(r0), collapse(r1), priors, cfg);
}

/// cb-norm distance of two channels, i.e. comb_distance restricted to
/// 1-combs, whose tester normalizations are exactly I (x) sigma.
inline double cb_distance_n1(const Comb& o0, const Comb& o1,
                             const DiscriminationConfig& cfg = {}) {
  if (o0.size() != 1 || o1.size() != 1) {
    throw InvalidArgument("cb_distance_n1 takes 1-combs");
  }
  return comb_distance(o0, o1, {0.5, 0.5}, cfg).distance;
}

struct LowerBound {
  double p_error = 0.0;
  double distance = 0.0;  // 1 - 2 p_error at equal priors
};

/// Error probability of a fixed two-outcome tester, P0 guessing R0.
inline LowerBound distance_lower_bound(const Comb& r0, const Comb& r1, const Tester& t,
                                       std::pair<double, double> priors = {0.5, 0.5}) {
  validate_tester(t).raise();
  if (t.elements.size() != 2) throw InvalidTester("expected a two-outcome tester");
  LowerBound lb;
  lb.p_error = priors.first * born(t.elements[1], r0.op()) +
               priors.second * born(t.elements[0], r1.op());
  const double pe_eq =
      0.5 * born(t.elements[1], r0.op()) + 0.5 * born(t.elements[0], r1.op());
  lb.distance = 1.0 - 2.0 * pe_eq;
  return lb;
}

}  // namespace qcomb
