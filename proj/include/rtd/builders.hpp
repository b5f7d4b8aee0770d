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

// Builders for the robust subproblems solved in each outer iteration.
//
// Every robust constraint has the form ||A(x)^H (h + d) - c(x)|| <= b for all ||d|| <= eps,
// with A(x) (B x M) and c(x) (M) affine in the variables. It is lifted to the LMI
//
//   [ b - eta   r^H        0        ]
//   [ r         b I_M     -eps A^H  ]  >= 0,   r = A^H h - c,
//   [ 0        -eps A      eta I_B  ]
//
// which is exact for a single ball constraint. Because the per-cell MSE sum splits into one
// such norm per transmitter, each worst case is a sum of independent per-transmitter maxima.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rtd/conic.hpp"
#include "rtd/metrics.hpp"
#include "rtd/network.hpp"
#include "rtd/worst_case.hpp"

namespace rtd {

/// Everything the optimizer knows: estimates, radii, boxes and caps, possibly in scaled units.
struct RobustModel {
  Dims dm;
  double n0 = 1.0;
  Eigen::VectorXd q_c_max;  // K_c amplitude boxes
  Eigen::VectorXd q_d_max;  // K_d
  Eigen::VectorXd caps;     // L
  std::vector<Eigen::MatrixXcd> h_c;  // per BS, B x K_c estimates
  std::vector<Eigen::MatrixXcd> h_d;  // per BS, B x K_d
  Eigen::MatrixXd eps_c;              // K_c x L
  Eigen::MatrixXd eps_d;              // K_d x L
  WorstCaseD2DChannels wc;
  Eigen::MatrixXd rho;  // K_d x L
};

/// Physical-unit model of a channel set.
inline RobustModel make_robust_model(const SystemConfig& cfg, const ChannelSet& cs) {
  RobustModel m;
  m.dm = Dims::of(cfg);
  m.n0 = cfg.N0;
  m.q_c_max = Eigen::VectorXd::Constant(m.dm.Kc(), std::sqrt(cfg.P_c_max));
  m.q_d_max = Eigen::VectorXd::Constant(m.dm.Kd(), std::sqrt(cfg.P_d_max));
  m.caps = Eigen::VectorXd::Constant(m.dm.L, cfg.a);
  m.h_c = cs.estimate.h_c;
  m.h_d = cs.estimate.h_d;
  m.eps_c = cs.radii.h_c;
  m.eps_d = cs.radii.h_d;
  m.wc = worst_case_d2d_channels(cs.estimate, cs.radii);
  m.rho = interference_weights(cs.estimate, cs.radii);
  return m;
}

/// Rescales every transmitter by q_max / sqrt(N0) so that boxes become [0, 1] and noise 1.
/// Returns the per-transmitter factors (cellular first, then D2D) through `scale`.
inline RobustModel normalized(const RobustModel& in, Eigen::VectorXd* scale = nullptr) {
  RobustModel m = in;
  const double sn = std::sqrt(in.n0);
  const Eigen::VectorXd sc = in.q_c_max / sn;
  const Eigen::VectorXd sd = in.q_d_max / sn;
  for (int l = 0; l < in.dm.L; ++l) {
    m.h_c[l] = in.h_c[l] * sc.asDiagonal();
    m.h_d[l] = in.h_d[l] * sd.asDiagonal();
  }
  m.eps_c = sc.asDiagonal() * in.eps_c;
  m.eps_d = sd.asDiagonal() * in.eps_d;
  m.wc.g_c = sc.asDiagonal() * in.wc.g_c;
  m.wc.g_d = sd.asDiagonal() * in.wc.g_d;
  m.rho = sd.cwiseAbs2().asDiagonal() * in.rho;
  m.caps = in.caps / in.n0;
  m.q_c_max.setOnes();
  m.q_d_max.setOnes();
  m.n0 = 1.0;
  if (scale) {
    scale->resize(sc.size() + sd.size());
    *scale << sc, sd;
  }
  return m;
}

/// Contribution x_var * (A, c) to an affine robust-norm constraint.
struct AffineTerm {
  int var = -1;
  Eigen::MatrixXcd A;
  Eigen::VectorXcd c;
};

/// Appends the lifted LMI for ||A(x)^H (h + d) - c(x)|| <= x_b, ||d|| <= eps, multiplier x_eta.
inline void add_robust_norm_block(conic::ConicProblem& p, const Eigen::MatrixXcd& A0, const Eigen::VectorXcd& c0,
                                  const std::vector<AffineTerm>& terms, const Eigen::VectorXcd& h, double eps,
                                  int b_var, int eta_var) {
  if (eps < 0.0) throw std::invalid_argument("add_robust_norm_block: negative radius");
  const int B = static_cast<int>(A0.rows());
  const int M = static_cast<int>(A0.cols());
  conic::LmiBlock blk(1 + M + B);
  auto fill = [&](conic::SparseHermitian& F, const Eigen::MatrixXcd& A, const Eigen::VectorXcd& c) {
    const Eigen::RowVectorXcd hA = h.adjoint() * A;
    for (int m = 0; m < M; ++m) F.add(0, 1 + m, hA(m) - std::conj(c(m)));
    if (eps > 0.0)
      for (int m = 0; m < M; ++m)
        for (int j = 0; j < B; ++j) F.add(1 + m, 1 + M + j, -eps * std::conj(A(j, m)));
  };
  fill(blk.constant, A0, c0);
  for (const auto& t : terms) fill(blk.coefficient(t.var), t.A, t.c);
  auto& fb = blk.coefficient(b_var);
  fb.add(0, 0, 1.0);
  for (int m = 0; m < M; ++m) fb.add(1 + m, 1 + m, 1.0);
  auto& fe = blk.coefficient(eta_var);
  fe.add(0, 0, -1.0);
  for (int j = 0; j < B; ++j) fe.add(1 + M + j, 1 + M + j, 1.0);
  p.lmi_blocks.push_back(std::move(blk));
}

/// (b, eta) making the block strictly feasible for residual r and strip S = eps A.
inline std::pair<double, double> strictly_feasible_pair(double r_norm, double strip_fro) {
  const double eta = std::max(1.0, strip_fro);
  return {eta + strip_fro * strip_fro / eta + r_norm + 1.0, eta};
}

enum class ReceiveMode {
  Joint,            // J and gamma free
  FixedDirections,  // J = W diag(alpha) with W fixed; alpha (complex) and gamma free
  Frozen,           // J and gamma fixed; only the per-transmitter bounds are free
};

/// Variable map of a receive-design problem for one cell. Transmitters are ordered as all
/// cellular users followed by all D2D transmitters.
struct ReceiveDesignLayout {
  int cell = 0;
  ReceiveMode mode = ReceiveMode::Joint;
  int B = 0;
  int M = 0;
  int n_vars = 0;
  std::vector<int> j_re, j_im;          // Joint: entry (b, m) at index b + B m
  std::vector<int> alpha_re, alpha_im;  // FixedDirections: per stream
  std::vector<int> gamma;               // per stream, -1 when frozen
  std::vector<int> b, eta;              // per transmitter
  Eigen::MatrixXcd J_fixed;             // Frozen
  Eigen::VectorXd gamma_fixed;          // Frozen
  Eigen::MatrixXcd W_fixed;             // FixedDirections
  int block_count = 0;
  int block_dim = 0;  // complex dimension 1 + M + B
};

struct BuiltReceive {
  conic::ConicProblem problem;
  ReceiveDesignLayout layout;
};

namespace detail {

// Transmitter i of the receive problem: (estimate at BS l, radius, power, own stream or -1).
struct TxView {
  Eigen::VectorXcd h;
  double eps;
  double q;
  int own_stream;
};

inline TxView tx_view(const RobustModel& md, const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d, int l, int i) {
  const int Kc = md.dm.Kc();
  if (i < Kc) {
    const int own = md.dm.cu_cell(i) == l ? i % md.dm.M : -1;
    return {md.h_c[l].col(i), md.eps_c(i, l), q_c(i), own};
  }
  const int n = i - Kc;
  return {md.h_d[l].col(n), md.eps_d(n, l), q_d(n), -1};
}

inline void check_powers(const RobustModel& md, const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d) {
  if (q_c.size() != md.dm.Kc() || q_d.size() != md.dm.Kd())
    throw std::invalid_argument("receive design: power vector sizes do not match the model");
}

}  // namespace detail

/// Receive design of cell l at fixed powers:
///   minimize  sum_i b_i^2 + N0 ||J||_F^2 - 2 sum_m ln gamma_m - M
///   s.t.      ||q_i J^H (h_i + d) - gamma_m [i = own m] e_m|| <= b_i  for all ||d|| <= eps_i.
/// The optimal value is the certified worst-case sum over streams of gamma^2 MSE - 2 ln gamma - 1.
/// `J_start`/`gamma_start` (optional) give a warm start for Joint mode; Frozen mode uses them as
/// the fixed design and FixedDirections takes W from `J_start` (gamma_start ignored).
inline BuiltReceive build_receive_problem(const RobustModel& md, const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d,
                                          int l, ReceiveMode mode, const Eigen::MatrixXcd* J_start = nullptr,
                                          const Eigen::VectorXd* gamma_start = nullptr) {
  detail::check_powers(md, q_c, q_d);
  const int B = md.dm.B, M = md.dm.M;
  const int T = md.dm.Kc() + md.dm.Kd();
  BuiltReceive out;
  auto& lay = out.layout;
  lay.cell = l;
  lay.mode = mode;
  lay.B = B;
  lay.M = M;
  lay.block_count = T;
  lay.block_dim = 1 + M + B;
  int nv = 0;
  if (mode == ReceiveMode::Joint) {
    for (int m = 0; m < M; ++m)
      for (int b = 0; b < B; ++b) {
        lay.j_re.push_back(nv++);
        lay.j_im.push_back(nv++);
      }
  } else if (mode == ReceiveMode::FixedDirections) {
    if (!J_start) throw std::invalid_argument("FixedDirections mode needs receive directions");
    lay.W_fixed = *J_start;
    for (int m = 0; m < M; ++m) {
      lay.alpha_re.push_back(nv++);
      lay.alpha_im.push_back(nv++);
    }
  } else {
    if (!J_start || !gamma_start) throw std::invalid_argument("Frozen mode needs J and gamma");
    lay.J_fixed = *J_start;
    lay.gamma_fixed = *gamma_start;
  }
  if (mode != ReceiveMode::Frozen)
    for (int m = 0; m < M; ++m) lay.gamma.push_back(nv++);
  else
    lay.gamma.assign(M, -1);
  for (int i = 0; i < T; ++i) lay.b.push_back(nv++);
  for (int i = 0; i < T; ++i) lay.eta.push_back(nv++);
  lay.n_vars = nv;

  conic::ConicProblem& p = out.problem;
  p = conic::ConicProblem(nv);
  p.objective.constant = -static_cast<double>(M);
  for (int i = 0; i < T; ++i) {
    p.objective.Q(lay.b[i], lay.b[i]) = 1.0;
    p.lower(lay.b[i]) = 0.0;
    p.lower(lay.eta[i]) = 0.0;
  }
  if (mode == ReceiveMode::Joint) {
    for (std::size_t v = 0; v < lay.j_re.size(); ++v) {
      p.objective.Q(lay.j_re[v], lay.j_re[v]) = md.n0;
      p.objective.Q(lay.j_im[v], lay.j_im[v]) = md.n0;
    }
  } else if (mode == ReceiveMode::FixedDirections) {
    for (int m = 0; m < M; ++m) {
      const double w2 = md.n0 * lay.W_fixed.col(m).squaredNorm();
      p.objective.Q(lay.alpha_re[m], lay.alpha_re[m]) = w2;
      p.objective.Q(lay.alpha_im[m], lay.alpha_im[m]) = w2;
    }
  } else {
    p.objective.constant += md.n0 * lay.J_fixed.squaredNorm();
    for (int m = 0; m < M; ++m) p.objective.constant -= 2.0 * std::log(lay.gamma_fixed(m));
  }
  if (mode != ReceiveMode::Frozen)
    for (int m = 0; m < M; ++m) {
      p.objective.log_terms.push_back({lay.gamma[m], 2.0});
      p.lower(lay.gamma[m]) = 0.0;
    }

  // Start point: previous design when given, else J = 0 (alpha = 1) and gamma = 1.
  Eigen::MatrixXcd J0 = Eigen::MatrixXcd::Zero(B, M);
  Eigen::VectorXd g0 = Eigen::VectorXd::Ones(M);
  if (mode == ReceiveMode::Joint && J_start && gamma_start) {
    J0 = *J_start;
    g0 = *gamma_start;
  } else if (mode == ReceiveMode::FixedDirections) {
    J0 = lay.W_fixed;
  } else if (mode == ReceiveMode::Frozen) {
    J0 = lay.J_fixed;
    g0 = lay.gamma_fixed;
  }
  if (mode == ReceiveMode::Joint)
    for (int m = 0; m < M; ++m)
      for (int b = 0; b < B; ++b) {
        p.start(lay.j_re[b + B * m]) = J0(b, m).real();
        p.start(lay.j_im[b + B * m]) = J0(b, m).imag();
      }
  if (mode == ReceiveMode::FixedDirections)
    for (int m = 0; m < M; ++m) {
      p.start(lay.alpha_re[m]) = 1.0;
      p.start(lay.alpha_im[m]) = 0.0;
    }
  if (mode != ReceiveMode::Frozen)
    for (int m = 0; m < M; ++m) p.start(lay.gamma[m]) = g0(m);

  const Eigen::VectorXcd zeroM = Eigen::VectorXcd::Zero(M);
  for (int i = 0; i < T; ++i) {
    const detail::TxView tx = detail::tx_view(md, q_c, q_d, l, i);
    std::vector<AffineTerm> terms;
    Eigen::MatrixXcd A0 = Eigen::MatrixXcd::Zero(B, M);
    Eigen::VectorXcd c0 = zeroM;
    if (mode == ReceiveMode::Joint) {
      for (int m = 0; m < M; ++m)
        for (int b = 0; b < B; ++b) {
          AffineTerm re{lay.j_re[b + B * m], Eigen::MatrixXcd::Zero(B, M), zeroM};
          re.A(b, m) = tx.q;
          AffineTerm im{lay.j_im[b + B * m], Eigen::MatrixXcd::Zero(B, M), zeroM};
          im.A(b, m) = cplx(0.0, tx.q);
          terms.push_back(std::move(re));
          terms.push_back(std::move(im));
        }
    } else if (mode == ReceiveMode::FixedDirections) {
      for (int m = 0; m < M; ++m) {
        AffineTerm re{lay.alpha_re[m], Eigen::MatrixXcd::Zero(B, M), zeroM};
        re.A.col(m) = tx.q * lay.W_fixed.col(m);
        AffineTerm im{lay.alpha_im[m], Eigen::MatrixXcd::Zero(B, M), zeroM};
        im.A.col(m) = cplx(0.0, tx.q) * lay.W_fixed.col(m);
        terms.push_back(std::move(re));
        terms.push_back(std::move(im));
      }
    } else {
      A0 = tx.q * lay.J_fixed;
    }
    if (tx.own_stream >= 0) {
      if (mode == ReceiveMode::Frozen) {
        c0(tx.own_stream) = lay.gamma_fixed(tx.own_stream);
      } else {
        AffineTerm g{lay.gamma[tx.own_stream], Eigen::MatrixXcd::Zero(B, M), zeroM};
        g.c(tx.own_stream) = 1.0;
        terms.push_back(std::move(g));
      }
    }
    add_robust_norm_block(p, A0, c0, terms, tx.h, tx.eps, lay.b[i], lay.eta[i]);

    // Strictly feasible bounds for this block at the start point.
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(M);
    if (tx.own_stream >= 0) c(tx.own_stream) = g0(tx.own_stream);
    const Eigen::MatrixXcd A = tx.q * J0;
    const Eigen::VectorXcd r = A.adjoint() * tx.h - c;
    const auto [b0, e0] = strictly_feasible_pair(r.norm(), tx.eps * A.norm());
    p.start(lay.b[i]) = b0;
    p.start(lay.eta[i]) = e0;
  }
  return out;
}

inline BuiltReceive build_receive_design(const RobustModel& md, const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d,
                                         int l, const Eigen::MatrixXcd* J_warm = nullptr,
                                         const Eigen::VectorXd* gamma_warm = nullptr) {
  return build_receive_problem(md, q_c, q_d, l, ReceiveMode::Joint, J_warm, gamma_warm);
}

struct ReceiveSolution {
  Eigen::MatrixXcd J;
  Eigen::VectorXd gamma;
  Eigen::MatrixXcd W;
  Eigen::VectorXd u_c;  // M entries of this cell
  double r_hat = 0.0;   // certified worst-case sum of gamma^2 MSE - 2 ln gamma - 1
};

inline ReceiveSolution extract_receive_solution(const conic::SolveReport& rep, const ReceiveDesignLayout& lay) {
  ReceiveSolution s;
  const Eigen::VectorXd& x = rep.x_star;
  s.J = Eigen::MatrixXcd::Zero(lay.B, lay.M);
  s.gamma.resize(lay.M);
  switch (lay.mode) {
    case ReceiveMode::Joint:
      for (int m = 0; m < lay.M; ++m)
        for (int b = 0; b < lay.B; ++b) s.J(b, m) = cplx(x(lay.j_re[b + lay.B * m]), x(lay.j_im[b + lay.B * m]));
      break;
    case ReceiveMode::FixedDirections:
      for (int m = 0; m < lay.M; ++m) s.J.col(m) = cplx(x(lay.alpha_re[m]), x(lay.alpha_im[m])) * lay.W_fixed.col(m);
      break;
    case ReceiveMode::Frozen:
      s.J = lay.J_fixed;
      break;
  }
  for (int m = 0; m < lay.M; ++m) s.gamma(m) = lay.mode == ReceiveMode::Frozen ? lay.gamma_fixed(m) : x(lay.gamma[m]);
  s.W = s.J * s.gamma.cwiseInverse().asDiagonal();
  s.u_c = (2.0 * s.gamma.array().log() + 1.0).matrix();
  s.r_hat = rep.objective_value;
  return s;
}

/// Fixed quantities of the power stage.
struct PowerStageInputs {
  std::vector<Eigen::MatrixXcd> J;      // per cell
  std::vector<Eigen::VectorXd> gamma;  // per cell
  Eigen::VectorXcd f;                  // K_d equalizers
  Eigen::VectorXd gamma_d;             // K_d, exp((u_d - 1) / 2)
};

struct PowerLayout {
  std::vector<int> q;    // power variables
  std::vector<int> xi;   // per block
  std::vector<int> eta;  // per block
  std::vector<int> block_tx;    // transmitter of each block (index into q)
  std::vector<int> block_cell;  // BS of each block
  Eigen::VectorXd quad;         // CU: C_k; D2D: theta per link
  Eigen::VectorXd lin;          // D2D: phi per link
  int block_dim = 0;
};

struct BuiltPower {
  conic::ConicProblem problem;
  PowerLayout layout;
};

/// Per-CU power problem for cellular user k:
///   minimize  sum_j xi_j^2 + q^2 sum_n |gamma_d,n f_n gbar_c(k, n)|^2
///   s.t.      ||q J_j^H (h_kj + d) - gamma_j,m [j = own cell] e_m|| <= xi_j  for all ||d|| <= eps_kj,
///             0 <= q <= q_max.
/// The optimum is the part of the objective V that depends on this user's power.
inline BuiltPower build_cu_power(const RobustModel& md, const PowerStageInputs& in, int k, double q_start = -1.0) {
  const int L = md.dm.L, B = md.dm.B, M = md.dm.M;
  const int own_cell = md.dm.cu_cell(k);
  const int own_stream = k % M;
  BuiltPower out;
  auto& lay = out.layout;
  lay.q = {0};
  for (int j = 0; j < L; ++j) lay.xi.push_back(1 + j);
  for (int j = 0; j < L; ++j) lay.eta.push_back(1 + L + j);
  lay.block_dim = 1 + M + B;
  double C = 0.0;
  for (int n = 0; n < md.dm.Kd(); ++n) C += std::norm(in.gamma_d(n) * in.f(n) * md.wc.g_c(k, n));
  lay.quad = Eigen::VectorXd::Constant(1, C);

  conic::ConicProblem& p = out.problem;
  p = conic::ConicProblem(1 + 2 * L);
  p.objective.Q(0, 0) = C;
  p.lower(0) = 0.0;
  p.upper(0) = md.q_c_max(k);
  const double q0 = q_start > 0.0 ? std::clamp(q_start, 1e-3 * md.q_c_max(k), 0.99 * md.q_c_max(k)) : 0.5 * md.q_c_max(k);
  p.start(0) = q0;
  for (int j = 0; j < L; ++j) {
    p.objective.Q(lay.xi[j], lay.xi[j]) = 1.0;
    p.lower(lay.xi[j]) = 0.0;
    p.lower(lay.eta[j]) = 0.0;
    Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(M);
    if (j == own_cell) c0(own_stream) = in.gamma[j](own_stream);
    const Eigen::VectorXcd h = md.h_c[j].col(k);
    const double eps = md.eps_c(k, j);
    AffineTerm t{0, in.J[j], Eigen::VectorXcd::Zero(M)};
    add_robust_norm_block(p, Eigen::MatrixXcd::Zero(B, M), c0, {t}, h, eps, lay.xi[j], lay.eta[j]);
    lay.block_tx.push_back(0);
    lay.block_cell.push_back(j);
    const Eigen::VectorXcd r = q0 * (in.J[j].adjoint() * h) - c0;
    const auto [x0, e0] = strictly_feasible_pair(r.norm(), eps * q0 * in.J[j].norm());
    p.start(lay.xi[j]) = x0;
    p.start(lay.eta[j]) = e0;
  }
  return out;
}

/// Joint D2D power problem:
///   minimize  sum_n [ sum_j xi_nj^2 + theta_n q_n^2 - 2 phi_n q_n ]
///   s.t.      ||q_n J_j^H (h_nj + d)|| <= xi_nj  for all ||d|| <= eps_nj,
///             sum_n rho_nl q_n^2 <= a_l for every BS l,  0 <= q_n <= q_max.
/// theta_n = sum_s |gamma_d,s f_s gbar_d(n, s)|^2 and phi_n = gamma_d,n^2 Re(conj(f_n) gbar_own,n).
inline BuiltPower build_d2d_power(const RobustModel& md, const PowerStageInputs& in,
                                  const Eigen::VectorXd* q_warm = nullptr) {
  const int L = md.dm.L, B = md.dm.B, M = md.dm.M, Kd = md.dm.Kd();
  for (int l = 0; l < L; ++l)
    if (!(md.caps(l) > 0.0)) throw std::invalid_argument("build_d2d_power: interference caps must be positive");
  BuiltPower out;
  auto& lay = out.layout;
  lay.block_dim = 1 + M + B;
  int nv = 0;
  for (int n = 0; n < Kd; ++n) lay.q.push_back(nv++);
  for (int n = 0; n < Kd; ++n)
    for (int j = 0; j < L; ++j) lay.xi.push_back(nv++);
  for (int n = 0; n < Kd; ++n)
    for (int j = 0; j < L; ++j) lay.eta.push_back(nv++);
  lay.quad.resize(Kd);
  lay.lin.resize(Kd);
  for (int n = 0; n < Kd; ++n) {
    double th = 0.0;
    for (int s = 0; s < Kd; ++s) th += std::norm(in.gamma_d(s) * in.f(s) * md.wc.g_d(n, s));
    lay.quad(n) = th;
    lay.lin(n) = in.gamma_d(n) * in.gamma_d(n) * (std::conj(in.f(n)) * md.wc.own(n)).real();
  }

  conic::ConicProblem& p = out.problem;
  p = conic::ConicProblem(nv);
  for (int n = 0; n < Kd; ++n) {
    p.objective.Q(lay.q[n], lay.q[n]) = lay.quad(n);
    p.objective.c(lay.q[n]) = -2.0 * lay.lin(n);
    p.lower(lay.q[n]) = 0.0;
    p.upper(lay.q[n]) = md.q_d_max(n);
  }
  for (int l = 0; l < L; ++l) {
    auto& g = p.add_scalar_ineq();
    for (int n = 0; n < Kd; ++n) g.A(lay.q[n], lay.q[n]) = md.rho(n, l);
    g.a0 = -md.caps(l);
  }

  // Start: previous powers pulled into the interior (a point on a cap or box face costs many
  // damped Newton steps), else half of the cap-scaled box.
  Eigen::VectorXd q0(Kd);
  if (q_warm != nullptr && q_warm->size() == Kd) {
    q0 = q_warm->cwiseMax(1e-3 * md.q_d_max).cwiseMin(0.99 * md.q_d_max);
    for (int l = 0; l < L; ++l) {
      const double load = md.rho.col(l).dot(q0.cwiseAbs2());
      if (load > 0.9 * md.caps(l)) q0 *= std::sqrt(0.9 * md.caps(l) / load);
    }
  } else {
    double s = 1.0;
    for (int l = 0; l < L; ++l) {
      const double load = md.rho.col(l).dot(md.q_d_max.cwiseAbs2());
      if (load > 0.0) s = std::min(s, std::sqrt(md.caps(l) / load));
    }
    q0 = 0.5 * s * md.q_d_max;
  }
  for (int n = 0; n < Kd; ++n) p.start(lay.q[n]) = q0(n);

  int blk = 0;
  for (int n = 0; n < Kd; ++n)
    for (int j = 0; j < L; ++j, ++blk) {
      p.objective.Q(lay.xi[blk], lay.xi[blk]) = 1.0;
      p.lower(lay.xi[blk]) = 0.0;
      p.lower(lay.eta[blk]) = 0.0;
      const Eigen::VectorXcd h = md.h_d[j].col(n);
      const double eps = md.eps_d(n, j);
      AffineTerm t{lay.q[n], in.J[j], Eigen::VectorXcd::Zero(M)};
      add_robust_norm_block(p, Eigen::MatrixXcd::Zero(B, M), Eigen::VectorXcd::Zero(M), {t}, h, eps, lay.xi[blk],
                            lay.eta[blk]);
      lay.block_tx.push_back(n);
      lay.block_cell.push_back(j);
      const Eigen::VectorXcd r = q0(n) * (in.J[j].adjoint() * h);
      const auto [x0, e0] = strictly_feasible_pair(r.norm(), eps * q0(n) * in.J[j].norm());
      p.start(lay.xi[blk]) = x0;
      p.start(lay.eta[blk]) = e0;
    }
  return out;
}

}  // namespace rtd
