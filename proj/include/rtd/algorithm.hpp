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

// Alternating robust transmission design: receive filters and weights, D2D equalizers and
// weights, then cellular and D2D powers, repeated until the objective V settles.
//
// The loop works on a normalized copy of the model (every transmitter scaled to a unit box and
// unit noise). SINR, MSE and V are invariant under that scaling; the physical design is
// recovered as q = q' sqrt(P_max), J = J' / sqrt(N0), f = f' / sqrt(N0).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtd/builders.hpp"
#include "rtd/config.hpp"
#include "rtd/conic.hpp"
#include "rtd/metrics.hpp"
#include "rtd/network.hpp"
#include "rtd/rng.hpp"
#include "rtd/worst_case.hpp"

namespace rtd {

struct RtdOptions {
  int max_iters = 50;
  double rel_tol = 1e-3;
  conic::SolverOptions solver;
  bool trace_enabled = true;
  int empirical_samples = 200;   // channel draws for the sampled worst-case rate
  std::uint64_t eval_stream = 0;  // selects the evaluation draws; the harness passes the drop index

  void validate() const {
    if (max_iters < 1) throw std::invalid_argument("RtdOptions: max_iters must be >= 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("RtdOptions: rel_tol must be > 0");
    if (empirical_samples < 0) throw std::invalid_argument("RtdOptions: empirical_samples must be >= 0");
  }
};

enum class RtdStatus { Converged, MaxIter, SolverFailure };

inline const char* to_string(RtdStatus s) {
  switch (s) {
    case RtdStatus::Converged: return "Converged";
    case RtdStatus::MaxIter: return "MaxIter";
    case RtdStatus::SolverFailure: return "SolverFailure";
  }
  return "?";
}

/// A subproblem that did not reach Optimal even after the looser retry.
class SolverError : public std::runtime_error {
 public:
  SolverError(int iteration, const std::string& stage, conic::SolveStatus status)
      : std::runtime_error(describe(iteration, stage, status)), iteration_(iteration), stage_(stage), status_(status) {}
  int iteration() const { return iteration_; }
  const std::string& stage() const { return stage_; }
  conic::SolveStatus status() const { return status_; }

 private:
  static std::string describe(int it, const std::string& stage, conic::SolveStatus s) {
    std::ostringstream os;
    os << "iteration " << it << ", " << stage << ": solver returned " << conic::to_string(s);
    return os.str();
  }
  int iteration_;
  std::string stage_;
  conic::SolveStatus status_;
};

struct RtdResult {
  DesignState state;  // physical units
  std::vector<double> v_trace;
  int iters_used = 0;
  RtdStatus status = RtdStatus::MaxIter;
  std::string message;
  int solver_retries = 0;

  double v_final = 0.0;
  double v_lower_bound = 0.0;

  // Certified worst case of the final design against the true uncertainty radii.
  double v_certified = 0.0;
  double surrogate_rate_bits = 0.0;
  double cellular_bits = 0.0;
  double d2d_bits = 0.0;

  double empirical_worst_rate_bits = 0.0;  // minimum over sampled channels in the balls
  RateReport on_truth;                     // rates with the realized channel

  Eigen::VectorXd cap_load;  // per BS, worst-case interference / a under the true radii
  bool cap_violated = false;
};

/// Full cellular power; D2D power scaled uniformly so that every interference cap holds.
inline void initialize_powers(const SystemConfig& cfg, const ChannelSet& cs, Eigen::VectorXd& q_c,
                              Eigen::VectorXd& q_d) {
  const Dims dm = Dims::of(cfg);
  q_c = Eigen::VectorXd::Constant(dm.Kc(), std::sqrt(cfg.P_c_max));
  const Eigen::MatrixXd rho = interference_weights(cs.estimate, cs.radii);
  double s = 1.0;
  for (int l = 0; l < dm.L; ++l) {
    const double load = rho.col(l).sum() * cfg.P_d_max;
    if (load > 0.0) s = std::min(s, cfg.a / load);
  }
  q_d = Eigen::VectorXd::Constant(dm.Kd(), std::sqrt(s * cfg.P_d_max));
}

namespace detail {

inline conic::SolveReport solve_stage(const conic::ConicProblem& p, const RtdOptions& opts, int iteration,
                                      const char* stage, int& retries) {
  conic::SolveReport rep = conic::solve(p, opts.solver);
  if (rep.status == conic::SolveStatus::MaxIter) {
    ++retries;
    conic::SolverOptions loose = opts.solver;
    loose.tol_gap *= 10.0;
    rep = conic::solve(p, loose);
  }
  if (rep.status != conic::SolveStatus::Optimal) throw SolverError(iteration, stage, rep.status);
  return rep;
}

inline double d2d_part(const RobustModel& md, const DesignState& st, Eigen::VectorXd* mse_out = nullptr) {
  double v = 0.0;
  Eigen::VectorXd mse(md.dm.Kd());
  for (int n = 0; n < md.dm.Kd(); ++n) {
    mse(n) = d2d_mse(st.f(n), st.q_c, st.q_d, md.wc.g_c, md.wc.g_d, n, md.n0);
    v += d2d_objective_term(mse(n), st.u_d(n));
  }
  if (mse_out) *mse_out = mse;
  return v;
}

}  // namespace detail

/// Worst-case per-cell value of a frozen (J, gamma) at the powers in `st`, one evaluation solve per cell.
inline double frozen_cellular_part(const RobustModel& md, const DesignState& st, const RtdOptions& opts, int iteration,
                                   int& retries) {
  double v = 0.0;
  for (int l = 0; l < md.dm.L; ++l) {
    const auto built = build_receive_problem(md, st.q_c, st.q_d, l, ReceiveMode::Frozen, &st.J[l], &st.gamma[l]);
    v += detail::solve_stage(built.problem, opts, iteration, "frozen evaluation", retries).objective_value;
  }
  return v;
}

namespace detail {

// True when transmitter power has no effect on any block of the given cells.
inline bool power_blind(const std::vector<Eigen::MatrixXcd>& J, const std::vector<Eigen::MatrixXcd>& h, int col,
                        const Eigen::MatrixXd& eps, int eps_row) {
  for (std::size_t j = 0; j < J.size(); ++j) {
    if ((J[j].adjoint() * h[j].col(col)).norm() != 0.0) return false;
    if (eps(eps_row, static_cast<Eigen::Index>(j)) != 0.0 && J[j].norm() != 0.0) return false;
  }
  return true;
}

}  // namespace detail

/// Power update of cellular user k. A user whose power leaves the objective unchanged gets q = 0.
inline double update_cu_power(const RobustModel& md, const PowerStageInputs& in, int k, double q_start,
                              const RtdOptions& opts, int iteration, int& retries) {
  const auto built = build_cu_power(md, in, k, q_start);
  if (built.layout.quad(0) == 0.0 && detail::power_blind(in.J, md.h_c, k, md.eps_c, k)) return 0.0;
  return detail::solve_stage(built.problem, opts, iteration, "cellular power", retries).x_star(0);
}

/// Joint D2D power update. Links whose power leaves the objective unchanged get q = 0, which
/// only loosens the interference caps for the others.
inline Eigen::VectorXd update_d2d_power(const RobustModel& md, const PowerStageInputs& in, const Eigen::VectorXd& q_warm,
                                       const RtdOptions& opts, int iteration, int& retries) {
  const int Kd = md.dm.Kd();
  Eigen::VectorXd q = q_warm;
  if (Kd == 0) return q;
  const auto built = build_d2d_power(md, in, &q_warm);
  const auto rep = detail::solve_stage(built.problem, opts, iteration, "D2D power", retries);
  for (int n = 0; n < Kd; ++n) {
    const bool blind = built.layout.quad(n) == 0.0 && built.layout.lin(n) == 0.0 &&
                       detail::power_blind(in.J, md.h_d, n, md.eps_d, n);
    q(n) = blind ? 0.0 : rep.x_star(built.layout.q[n]);
  }
  return q;
}

/// One outer iteration on a normalized model. Returns V after the power stage.
inline double rtd_iterate(const RobustModel& md, DesignState& st, const RtdOptions& opts, int iteration,
                          int& retries) {
  const Dims& dm = md.dm;
  const bool warm = static_cast<int>(st.J.size()) == dm.L;
  std::vector<Eigen::MatrixXcd> J(dm.L);
  std::vector<Eigen::VectorXd> gamma(dm.L);
  st.u_c.resize(dm.Kc());
  for (int l = 0; l < dm.L; ++l) {
    const auto built = warm ? build_receive_design(md, st.q_c, st.q_d, l, &st.J[l], &st.gamma[l])
                            : build_receive_design(md, st.q_c, st.q_d, l);
    const auto rep = detail::solve_stage(built.problem, opts, iteration, "receive design", retries);
    const ReceiveSolution sol = extract_receive_solution(rep, built.layout);
    J[l] = sol.J;
    gamma[l] = sol.gamma;
    st.u_c.segment(l * dm.M, dm.M) = sol.u_c;
  }
  st.J = J;
  st.gamma = gamma;

  st.f.resize(dm.Kd());
  st.u_d.resize(dm.Kd());
  for (int n = 0; n < dm.Kd(); ++n) {
    st.f(n) = mmse_filter_d2d(st.q_c, st.q_d, md.wc, n, md.n0);
    st.u_d(n) = auxiliary_u_star(d2d_mse(st.f(n), st.q_c, st.q_d, md.wc.g_c, md.wc.g_d, n, md.n0));
  }

  const PowerStageInputs in{st.J, st.gamma, st.f, (0.5 * (st.u_d.array() - 1.0)).exp().matrix()};
  Eigen::VectorXd q_c_new = st.q_c;
  for (int k = 0; k < dm.Kc(); ++k) q_c_new(k) = update_cu_power(md, in, k, st.q_c(k), opts, iteration, retries);
  const Eigen::VectorXd q_d_new = update_d2d_power(md, in, st.q_d, opts, iteration, retries);
  st.q_c = q_c_new;
  st.q_d = q_d_new;

  return frozen_cellular_part(md, st, opts, iteration, retries) + detail::d2d_part(md, st);
}

struct CoreRun {
  DesignState state;  // normalized units
  std::vector<double> v_trace;
  int iters_used = 0;
  RtdStatus status = RtdStatus::MaxIter;
  std::string message;
  int retries = 0;
};

/// Outer loop on a normalized model starting from normalized powers.
inline CoreRun run_core(const RobustModel& md, const Eigen::VectorXd& q_c0, const Eigen::VectorXd& q_d0,
                        const RtdOptions& opts) {
  opts.validate();
  CoreRun run;
  run.state.q_c = q_c0;
  run.state.q_d = q_d0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    double v = 0.0;
    try {
      v = rtd_iterate(md, run.state, opts, it, run.retries);
    } catch (const SolverError& e) {
      run.status = RtdStatus::SolverFailure;
      run.message = e.what();
      return run;
    }
    run.iters_used = it;
    run.v_trace.push_back(v);
    const std::size_t n = run.v_trace.size();
    if (n >= 2 && std::abs(v - run.v_trace[n - 2]) <= opts.rel_tol * (1.0 + std::abs(run.v_trace[n - 2]))) {
      run.status = RtdStatus::Converged;
      break;
    }
  }
  if (!opts.trace_enabled) run.v_trace = {run.v_trace.empty() ? 0.0 : run.v_trace.back()};
  return run;
}

/// Certifies a normalized design against `cs` (true radii) and fills the rate fields of `out`.
inline void finalize(const SystemConfig& cfg, const ChannelSet& cs, const CoreRun& core, const RtdOptions& opts,
                     RtdResult& out) {
  const Dims dm = Dims::of(cfg);
  Eigen::VectorXd scale;
  const RobustModel md = normalized(make_robust_model(cfg, cs), &scale);
  const DesignState& st = core.state;

  out.v_trace = core.v_trace;
  out.iters_used = core.iters_used;
  out.status = core.status;
  out.message = core.message;
  out.solver_retries = core.retries;
  out.v_final = core.v_trace.empty() ? 0.0 : core.v_trace.back();

  // Physical design.
  const double sn = std::sqrt(cfg.N0);
  DesignState& ph = out.state;
  ph.q_c = st.q_c * std::sqrt(cfg.P_c_max);
  ph.q_d = st.q_d * std::sqrt(cfg.P_d_max);
  ph.J.clear();
  for (const auto& j : st.J) ph.J.push_back(j / sn);
  ph.gamma = st.gamma;
  ph.u_c = st.u_c;
  ph.u_d = st.u_d;
  ph.f = st.f / sn;

  if (core.status == RtdStatus::SolverFailure || static_cast<int>(st.J.size()) != dm.L) return;

  // Certified surrogate: best gamma and scaling along the final receive directions under the true radii.
  int retries = out.solver_retries;
  double v_cell = 0.0;
  try {
    for (int l = 0; l < dm.L; ++l) {
      const Eigen::MatrixXcd W = st.W(l);
      const auto built = build_receive_problem(md, st.q_c, st.q_d, l, ReceiveMode::FixedDirections, &W);
      v_cell += detail::solve_stage(built.problem, opts, core.iters_used, "certification", retries).objective_value;
    }
  } catch (const SolverError& e) {
    out.status = RtdStatus::SolverFailure;
    out.message = e.what();
    out.solver_retries = retries;
    return;
  }
  out.solver_retries = retries;
  double v_d2d = 0.0;
  for (int n = 0; n < dm.Kd(); ++n) {
    const cplx f = mmse_filter_d2d(st.q_c, st.q_d, md.wc, n, md.n0);
    v_d2d += std::log(d2d_mse(f, st.q_c, st.q_d, md.wc.g_c, md.wc.g_d, n, md.n0));
  }
  out.v_certified = v_cell + v_d2d;
  out.surrogate_rate_bits = surrogate_rate(out.v_certified);
  out.cellular_bits = surrogate_rate(v_cell);
  out.d2d_bits = surrogate_rate(v_d2d);

  const std::vector<Eigen::MatrixXcd> W = ph.receive_filters();
  out.on_truth = sum_rate(W, ph.q_c, ph.q_d, cs.truth, dm, cfg.N0);
  if (opts.empirical_samples > 0) {
    auto rng = StreamFactory(cfg.seed, opts.eval_stream).stream(StreamTag::Evaluation, {});
    out.empirical_worst_rate_bits =
        empirical_worst_rate(W, ph.q_c, ph.q_d, cs, dm, cfg.N0, opts.empirical_samples, rng).sum_rate_bits;
  }

  const Eigen::MatrixXd rho = interference_weights(cs.estimate, cs.radii);
  out.cap_load.resize(dm.L);
  for (int l = 0; l < dm.L; ++l) out.cap_load(l) = rho.col(l).dot(ph.q_d.cwiseAbs2()) / cfg.a;
  out.cap_violated = dm.Kd() > 0 && out.cap_load.maxCoeff() > 1.0 + 1e-8;
}

/// Robust design against the radii in `cs`.
inline RtdResult run_rtd(const SystemConfig& cfg, const ChannelSet& cs, const RtdOptions& opts = {}) {
  cfg.validate();
  Eigen::VectorXd q_c, q_d;
  initialize_powers(cfg, cs, q_c, q_d);
  const RobustModel md = normalized(make_robust_model(cfg, cs));
  const CoreRun core = run_core(md, q_c / std::sqrt(cfg.P_c_max), q_d / std::sqrt(cfg.P_d_max), opts);
  RtdResult out;
  out.v_lower_bound = sinr_upper_bounds(cfg, cs).v_lower_bound;
  finalize(cfg, cs, core, opts, out);
  return out;
}

/// Optimization part of the non-robust baseline. It depends only on the estimates, so it can be
/// shared by every radius setting of one drop.
inline CoreRun nominal_core(const SystemConfig& cfg, const ChannelSet& cs, const RtdOptions& opts = {}) {
  cfg.validate();
  const ChannelSet nominal = without_uncertainty(cs);
  Eigen::VectorXd q_c, q_d;
  initialize_powers(cfg, nominal, q_c, q_d);
  const RobustModel md = normalized(make_robust_model(cfg, nominal));
  return run_core(md, q_c / std::sqrt(cfg.P_c_max), q_d / std::sqrt(cfg.P_d_max), opts);
}

/// Evaluates a nominal design against the true radii in `cs`.
/// The trace and its lower bound refer to the zero-radius problem that was optimized.
inline RtdResult evaluate_nominal(const SystemConfig& cfg, const ChannelSet& cs, const CoreRun& core,
                                  const RtdOptions& opts = {}) {
  RtdResult out;
  out.v_lower_bound = sinr_upper_bounds(cfg, without_uncertainty(cs)).v_lower_bound;
  finalize(cfg, cs, core, opts, out);
  return out;
}

/// Design that trusts the estimates, evaluated against the true radii in `cs`.
inline RtdResult run_nonrobust(const SystemConfig& cfg, const ChannelSet& cs, const RtdOptions& opts = {}) {
  return evaluate_nominal(cfg, cs, nominal_core(cfg, cs, opts), opts);
}

}  // namespace rtd
