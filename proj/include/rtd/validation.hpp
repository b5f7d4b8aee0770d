/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Self-check suites behind the `validate` command. Each suite draws its own random instances
// from a fixed seed and reports the worst deviation it saw.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rtd/algorithm.hpp"
#include "rtd/builders.hpp"
#include "rtd/conic.hpp"
#include "rtd/metrics.hpp"
#include "rtd/network.hpp"
#include "rtd/worst_case.hpp"

namespace rtd::validation {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline cplx cn(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
  const double re = n01(rng);
  return {re, n01(rng)};
}

inline Eigen::VectorXcd cn_vector(std::mt19937_64& rng, int n) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = cn(rng);
  return v;
}

inline CheckResult verdict(const std::string& name, double worst, double tol) {
  std::ostringstream os;
  os << "worst deviation " << worst << " (tolerance " << tol << ")";
  return {name, worst <= tol, os.str()};
}

// Small random network with unit-scale channels, every link's radius mu times its norm.
inline ChannelSet random_channels(std::mt19937_64& rng, const Dims& dm, double mu) {
  ChannelSet cs;
  auto& e = cs.estimate;
  e.h_c.assign(dm.L, Eigen::MatrixXcd(dm.B, dm.Kc()));
  e.h_d.assign(dm.L, Eigen::MatrixXcd(dm.B, dm.Kd()));
  e.g_c.resize(dm.Kc(), dm.Kd());
  e.g_d.resize(dm.Kd(), dm.Kd());
  for (int l = 0; l < dm.L; ++l) {
    for (int k = 0; k < dm.Kc(); ++k) e.h_c[l].col(k) = cn_vector(rng, dm.B);
    for (int n = 0; n < dm.Kd(); ++n) e.h_d[l].col(n) = cn_vector(rng, dm.B);
  }
  for (int n = 0; n < dm.Kd(); ++n) {
    for (int k = 0; k < dm.Kc(); ++k) e.g_c(k, n) = cn(rng);
    for (int s = 0; s < dm.Kd(); ++s) e.g_d(s, n) = (s == n ? 2.0 : 1.0) * cn(rng);
  }
  cs.truth = e;
  cs.radii.h_c.resize(dm.Kc(), dm.L);
  cs.radii.h_d.resize(dm.Kd(), dm.L);
  for (int l = 0; l < dm.L; ++l) {
    for (int k = 0; k < dm.Kc(); ++k) cs.radii.h_c(k, l) = mu * e.h_c[l].col(k).norm();
    for (int n = 0; n < dm.Kd(); ++n) cs.radii.h_d(n, l) = mu * e.h_d[l].col(n).norm();
  }
  cs.radii.g_c = mu * e.g_c.cwiseAbs();
  cs.radii.g_d = mu * e.g_d.cwiseAbs();
  return cs;
}

inline RobustModel unit_model(const ChannelSet& cs, const Dims& dm) {
  RobustModel m;
  m.dm = dm;
  m.q_c_max = Eigen::VectorXd::Ones(dm.Kc());
  m.q_d_max = Eigen::VectorXd::Ones(dm.Kd());
  m.h_c = cs.estimate.h_c;
  m.h_d = cs.estimate.h_d;
  m.eps_c = cs.radii.h_c;
  m.eps_d = cs.radii.h_d;
  m.wc = worst_case_d2d_channels(cs.estimate, cs.radii);
  m.rho = interference_weights(cs.estimate, cs.radii);
  m.caps = 0.5 * m.rho.colwise().sum().transpose();
  return m;
}

}  // namespace detail

/// Ball extrema of ||h + d||^2 bound sampled values and are attained by the returned points.
inline CheckResult ball_extrema(int instances = 100, int samples = 10000) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const int n = 1 + t % 4;
    const Eigen::VectorXcd h = detail::cn_vector(rng, n);
    const double eps = u(rng) * h.norm();
    const auto lo = worst_norm_min(h, eps);
    const auto hi = worst_norm_max(h, eps);
    worst = std::max(worst, std::abs((h + lo.delta).squaredNorm() - lo.value));
    worst = std::max(worst, std::abs((h + hi.delta).squaredNorm() - hi.value));
    for (int s = 0; s < samples; ++s) {
      const double v = (h + sample_ball(rng, n, eps)).squaredNorm();
      worst = std::max({worst, lo.value - v, v - hi.value});
    }
  }
  return detail::verdict("ball extrema", worst, 1e-12);
}

/// MMSE equals 1 / (1 + SINR) for the cellular MMSE filter and the D2D equalizer.
inline CheckResult mmse_sinr_identity(int instances = 200) {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> pw(0.05, 2.0);
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const Dims dm{1 + t % 2, 1 + (t / 2) % 2, 1 + t % 3, 2 + t % 3};
    const ChannelSet cs = detail::random_channels(rng, dm, 0.0);
    Eigen::VectorXd q_c(dm.Kc()), q_d(dm.Kd());
    for (int i = 0; i < dm.Kc(); ++i) q_c(i) = pw(rng);
    for (int i = 0; i < dm.Kd(); ++i) q_d(i) = pw(rng);
    const double n0 = pw(rng);
    for (int k = 0; k < dm.Kc(); ++k) {
      const Eigen::VectorXcd w = mmse_filter_bs(cs.estimate, q_c, q_d, dm, k, n0);
      const double sinr = cellular_sinr(w, q_c, q_d, cs.estimate, dm, k, n0);
      Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(dm.B, dm.M);
      J.col(k % dm.M) = w;
      const double mse =
          cellular_mse(J, Eigen::VectorXd::Ones(dm.M), q_c, q_d, cs.estimate, dm, dm.cu_cell(k), n0).plain(k % dm.M);
      worst = std::max(worst, std::abs(mse - 1.0 / (1.0 + sinr)));
    }
    const WorstCaseD2DChannels wc = worst_case_d2d_channels(cs.estimate, cs.radii);
    for (int n = 0; n < dm.Kd(); ++n) {
      const cplx f = mmse_filter_d2d(q_c, q_d, wc, n, n0);
      const double mse = d2d_mse(f, q_c, q_d, wc.g_c, wc.g_d, n, n0);
      const double sinr = d2d_sinr(q_c, q_d, wc.g_c, wc.g_d, n, n0);
      worst = std::max(worst, std::abs(mse - 1.0 / (1.0 + sinr)));
    }
  }
  return detail::verdict("MMSE-SINR identity", worst, 1e-9);
}

/// Points of solved receive and power problems satisfy the robust constraints they encode,
/// checked at sampled uncertainties on the surface of each ball.
inline CheckResult robust_constraint_sampling(int instances = 6, int samples = 100) {
  std::mt19937_64 rng(103);
  double worst = -1.0;
  bool solved = true;
  for (int t = 0; t < instances; ++t) {
    const Dims dm{1 + t % 2, 1 + t % 2, 1 + t % 3, 2 + t % 3};
    const RobustModel md = detail::unit_model(detail::random_channels(rng, dm, 0.3), dm);
    const Eigen::VectorXd q_c = Eigen::VectorXd::Constant(dm.Kc(), 0.8);
    const Eigen::VectorXd q_d = Eigen::VectorXd::Constant(dm.Kd(), 0.3);
    auto excess = [&](const Eigen::MatrixXcd& A, const Eigen::VectorXcd& c, const Eigen::VectorXcd& h, double eps,
                      double bound) {
      for (int s = 0; s < samples; ++s) {
        Eigen::VectorXcd d = sample_ball(rng, static_cast<int>(h.size()), 1.0);
        if (d.norm() > 0.0) d *= eps / d.norm();
        worst = std::max(worst, (A.adjoint() * (h + d) - c).norm() - bound);
      }
    };
    const int l = t % dm.L;
    const auto rx = build_receive_design(md, q_c, q_d, l);
    const auto rr = conic::solve(rx.problem);
    solved = solved && rr.status == conic::SolveStatus::Optimal;
    const ReceiveSolution sol = extract_receive_solution(rr, rx.layout);
    for (int i = 0; i < dm.Kc() + dm.Kd(); ++i) {
      const bool cu = i < dm.Kc();
      const int col = cu ? i : i - dm.Kc();
      Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dm.M);
      if (cu && dm.cu_cell(i) == l) c(i % dm.M) = sol.gamma(i % dm.M);
      const double q = cu ? q_c(col) : q_d(col);
      excess(q * sol.J, c, cu ? md.h_c[l].col(col) : md.h_d[l].col(col), cu ? md.eps_c(col, l) : md.eps_d(col, l),
             rr.x_star(rx.layout.b[i]));
    }
    PowerStageInputs in;
    for (int j = 0; j < dm.L; ++j) {
      in.J.push_back(Eigen::MatrixXcd::Identity(dm.B, dm.M) * 0.3);
      in.gamma.push_back(Eigen::VectorXd::Ones(dm.M));
    }
    in.f = Eigen::VectorXcd::Constant(dm.Kd(), 0.4);
    in.gamma_d = Eigen::VectorXd::Ones(dm.Kd());
    const int k = t % dm.Kc();
    const auto cu = build_cu_power(md, in, k);
    const auto cr = conic::solve(cu.problem);
    solved = solved && cr.status == conic::SolveStatus::Optimal;
    for (int j = 0; j < dm.L; ++j) {
      Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dm.M);
      if (dm.cu_cell(k) == j) c(k % dm.M) = 1.0;
      excess(cr.x_star(0) * in.J[j], c, md.h_c[j].col(k), md.eps_c(k, j), cr.x_star(cu.layout.xi[j]));
    }
    const auto dd = build_d2d_power(md, in);
    const auto dr = conic::solve(dd.problem);
    solved = solved && dr.status == conic::SolveStatus::Optimal;
    for (int n = 0; n < dm.Kd(); ++n)
      for (int j = 0; j < dm.L; ++j)
        excess(dr.x_star(dd.layout.q[n]) * in.J[j], Eigen::VectorXcd::Zero(dm.M), md.h_d[j].col(n), md.eps_d(n, j),
               dr.x_star(dd.layout.xi[n * dm.L + j]));
  }
  CheckResult r = detail::verdict("robust constraint sampling", worst, 1e-8);
  if (!solved) {
    r.passed = false;
    r.detail += "; a subproblem did not solve";
  }
  return r;
}

/// The objective trace of full runs never increases and stays above its lower bound.
inline CheckResult descent_monitor(int drops = 2, int max_iters = 12) {
  SystemConfig cfg;
  RtdOptions opts;
  opts.max_iters = max_iters;
  opts.empirical_samples = 0;
  double worst_rise = 0.0;
  bool ok = true;
  std::ostringstream os;
  for (double mu : {0.0, 0.3}) {
    cfg.mu = mu;
    for (int d = 0; d < drops; ++d) {
      const RtdResult r = run_rtd(cfg, generate_scenario(cfg, static_cast<std::uint64_t>(d)).channels, opts);
      if (r.status == RtdStatus::SolverFailure) ok = false;
      for (std::size_t i = 1; i < r.v_trace.size(); ++i)
        worst_rise = std::max(worst_rise, (r.v_trace[i] - r.v_trace[i - 1]) / (1.0 + std::abs(r.v_trace[i - 1])));
      for (double v : r.v_trace)
        if (v < r.v_lower_bound) ok = false;
    }
  }
  os << "largest relative rise " << worst_rise << " (tolerance 1e-6)";
  return {"descent monitor", ok && worst_rise <= 1e-6, os.str()};
}

/// Closed-form solver examples.
inline CheckResult solver_examples() {
  double worst = 0.0;
  bool ok = true;
  {
    // min x s.t. [[x, 1], [1, x]] >= 0  ->  x = 1
    conic::ConicProblem p(1);
    conic::LmiBlock b(2);
    b.constant.add(0, 1, 1.0);
    b.coefficient(0).add(0, 0, 1.0);
    b.coefficient(0).add(1, 1, 1.0);
    p.lmi_blocks.push_back(b);
    p.objective.c(0) = 1.0;
    p.start(0) = 5.0;
    const auto r = conic::solve(p);
    ok = ok && r.status == conic::SolveStatus::Optimal;
    worst = std::max(worst, std::abs(r.x_star(0) - 1.0));
  }
  {
    // min (x - 2)^2 on [0, 1]  ->  x = 1
    conic::ConicProblem p(1);
    p.objective.Q(0, 0) = 1.0;
    p.objective.c(0) = -4.0;
    p.objective.constant = 4.0;
    p.lower(0) = 0.0;
    p.upper(0) = 1.0;
    p.start(0) = 0.5;
    const auto r = conic::solve(p);
    ok = ok && r.status == conic::SolveStatus::Optimal;
    worst = std::max({worst, std::abs(r.x_star(0) - 1.0), std::abs(r.objective_value - 1.0)});
  }
  {
    // min -2 ln g s.t. g <= 3  ->  g = 3
    conic::ConicProblem p(1);
    p.objective.log_terms.push_back({0, 2.0});
    p.lower(0) = 0.0;
    auto& g = p.add_scalar_ineq();
    g.a(0) = 1.0;
    g.a0 = -3.0;
    p.start(0) = 1.0;
    const auto r = conic::solve(p);
    ok = ok && r.status == conic::SolveStatus::Optimal;
    worst = std::max(worst, std::abs(r.x_star(0) - 3.0));
  }
  CheckResult r = detail::verdict("solver examples", worst, 1e-6);
  r.passed = r.passed && ok;
  return r;
}

inline std::vector<CheckResult> run_all() {
  return {solver_examples(), ball_extrema(), mmse_sinr_identity(), robust_constraint_sampling(), descent_monitor()};
}

}  // namespace rtd::validation
