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

// SINR, MSE and rate evaluation, MMSE filters, the objective V and its lower bound.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "rtd/network.hpp"
#include "rtd/worst_case.hpp"

namespace rtd {

/// Alternating-optimization variables. Powers are amplitudes q = sqrt(p).
struct DesignState {
  Eigen::VectorXd q_c;                // K_c
  Eigen::VectorXd q_d;                // K_d
  std::vector<Eigen::MatrixXcd> J;    // per cell, B x M; J = W diag(gamma)
  std::vector<Eigen::VectorXd> gamma;  // per cell, M, strictly positive
  Eigen::VectorXd u_c;                // K_c
  Eigen::VectorXd u_d;                // K_d
  Eigen::VectorXcd f;                 // K_d, D2D equalizers

  Eigen::MatrixXcd W(int l) const { return J[l] * gamma[l].cwiseInverse().asDiagonal(); }
  std::vector<Eigen::MatrixXcd> receive_filters() const {
    std::vector<Eigen::MatrixXcd> w;
    for (int l = 0; l < static_cast<int>(J.size()); ++l) w.push_back(W(l));
    return w;
  }
};

struct RateReport {
  double sum_rate_bits = 0.0;
  double cellular_sum_bits = 0.0;
  double d2d_sum_bits = 0.0;
  Eigen::VectorXd per_link_sinr;  // K_c cellular entries followed by K_d D2D entries
};

/// SINR of cellular user k at its BS with receive vector w.
inline double cellular_sinr(const Eigen::VectorXcd& w, const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d,
                            const LinkSet& ch, const Dims& dm, int k, double n0) {
  const int l = dm.cu_cell(k);
  const Eigen::VectorXcd pc = ch.h_c[l].adjoint() * w;
  const Eigen::VectorXcd pd = ch.h_d[l].adjoint() * w;
  double interf = n0 * w.squaredNorm();
  for (int i = 0; i < dm.Kc(); ++i)
    if (i != k) interf += q_c(i) * q_c(i) * std::norm(pc(i));
  for (int s = 0; s < dm.Kd(); ++s) interf += q_d(s) * q_d(s) * std::norm(pd(s));
  return q_c(k) * q_c(k) * std::norm(pc(k)) / interf;
}

/// SINR of D2D receiver n for scalar coefficients g_c (K_c x K_d) and g_d (K_d x K_d).
inline double d2d_sinr(const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d, const Eigen::MatrixXcd& g_c,
                       const Eigen::MatrixXcd& g_d, int n, double n0) {
  double interf = n0;
  for (Eigen::Index k = 0; k < g_c.rows(); ++k) interf += q_c(k) * q_c(k) * std::norm(g_c(k, n));
  for (Eigen::Index s = 0; s < g_d.rows(); ++s)
    if (s != n) interf += q_d(s) * q_d(s) * std::norm(g_d(s, n));
  return q_d(n) * q_d(n) * std::norm(g_d(n, n)) / interf;
}

inline double worst_case_d2d_sinr(const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d,
                                  const WorstCaseD2DChannels& wc, int n, double n0) {
  return d2d_sinr(q_c, q_d, wc.g_c, wc.g_d, n, n0);
}

/// Covariance of everything received at BS l.
inline Eigen::MatrixXcd received_covariance(const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d, const LinkSet& ch,
                                            int l, double n0) {
  const Eigen::Index B = ch.h_c[l].rows();
  Eigen::MatrixXcd R = n0 * Eigen::MatrixXcd::Identity(B, B);
  R.noalias() += ch.h_c[l] * q_c.cwiseAbs2().asDiagonal() * ch.h_c[l].adjoint();
  R.noalias() += ch.h_d[l] * q_d.cwiseAbs2().asDiagonal() * ch.h_d[l].adjoint();
  return R;
}

/// MMSE receive vector q_k (A + G)^{-1} h_k of cellular user k.
inline Eigen::VectorXcd mmse_filter_bs(const LinkSet& ch, const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d,
                                       const Dims& dm, int k, double n0) {
  const int l = dm.cu_cell(k);
  const Eigen::MatrixXcd R = received_covariance(q_c, q_d, ch, l, n0);
  return q_c(k) * R.llt().solve(ch.h_c[l].col(k));
}

/// Scalar MMSE equalizer of D2D receiver n; the denominator includes the desired signal.
inline cplx mmse_filter_d2d(const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d, const WorstCaseD2DChannels& wc,
                            int n, double n0) {
  double den = n0;
  for (Eigen::Index k = 0; k < wc.g_c.rows(); ++k) den += q_c(k) * q_c(k) * std::norm(wc.g_c(k, n));
  for (Eigen::Index s = 0; s < wc.g_d.rows(); ++s) den += q_d(s) * q_d(s) * std::norm(wc.g_d(s, n));
  return q_d(n) * wc.own(n) / den;
}

struct StreamMse {
  Eigen::VectorXd scaled;  // gamma_m^2 MSE_m
  Eigen::VectorXd plain;   // MSE_m of W = J diag(gamma)^{-1}
};

/// Per-stream MSE of cell l expanded transmitter by transmitter:
/// gamma_m^2 MSE_m = sum_i |q_i J_m^H h_i - gamma_m [i = own]|^2 + N0 ||J_m||^2.
inline StreamMse cellular_mse(const Eigen::MatrixXcd& J, const Eigen::VectorXd& gamma, const Eigen::VectorXd& q_c,
                              const Eigen::VectorXd& q_d, const LinkSet& ch, const Dims& dm, int l, double n0) {
  const Eigen::MatrixXcd pc = J.adjoint() * ch.h_c[l];  // M x K_c
  const Eigen::MatrixXcd pd = J.adjoint() * ch.h_d[l];  // M x K_d
  StreamMse out;
  out.scaled.resize(dm.M);
  out.plain.resize(dm.M);
  for (int m = 0; m < dm.M; ++m) {
    const int own = l * dm.M + m;
    double v = n0 * J.col(m).squaredNorm();
    for (int i = 0; i < dm.Kc(); ++i) v += std::norm(q_c(i) * pc(m, i) - (i == own ? gamma(m) : 0.0));
    for (int s = 0; s < dm.Kd(); ++s) v += std::norm(q_d(s) * pd(m, s));
    out.scaled(m) = v;
    out.plain(m) = v / (gamma(m) * gamma(m));
  }
  return out;
}

/// MSE of D2D receiver n with equalizer f.
inline double d2d_mse(cplx f, const Eigen::VectorXd& q_c, const Eigen::VectorXd& q_d, const Eigen::MatrixXcd& g_c,
                      const Eigen::MatrixXcd& g_d, int n, double n0) {
  double pow = n0;
  for (Eigen::Index k = 0; k < g_c.rows(); ++k) pow += q_c(k) * q_c(k) * std::norm(g_c(k, n));
  for (Eigen::Index s = 0; s < g_d.rows(); ++s) pow += q_d(s) * q_d(s) * std::norm(g_d(s, n));
  return std::norm(f) * pow - 2.0 * q_d(n) * (std::conj(f) * g_d(n, n)).real() + 1.0;
}

inline double auxiliary_u_star(double mse) { return 1.0 - std::log(mse); }

/// One D2D term of V: exp(u - 1) MSE - u.
inline double d2d_objective_term(double mse, double u) { return std::exp(u - 1.0) * mse - u; }

inline double assemble_V(const Eigen::VectorXd& r_hat, const Eigen::VectorXd& d2d_mse_values,
                         const Eigen::VectorXd& u_d) {
  double v = r_hat.sum();
  for (Eigen::Index n = 0; n < d2d_mse_values.size(); ++n) v += d2d_objective_term(d2d_mse_values(n), u_d(n));
  return v;
}

struct SinrBounds {
  Eigen::VectorXd sigma_c;  // K_c
  Eigen::VectorXd sigma_d;  // K_d
  double v_lower_bound = 0.0;
};

/// Per-link SINR ceilings (P/N0)(|estimate| + eps)^2, valid for every channel in the
/// uncertainty set, and the implied lower bound sum ln 1/(1 + sigma) on V.
inline SinrBounds sinr_upper_bounds(const SystemConfig& cfg, const ChannelSet& cs) {
  const Dims dm = Dims::of(cfg);
  SinrBounds b;
  b.sigma_c.resize(dm.Kc());
  b.sigma_d.resize(dm.Kd());
  for (int k = 0; k < dm.Kc(); ++k) {
    const int l = dm.cu_cell(k);
    const double r = cs.estimate.h_c[l].col(k).norm() + cs.radii.h_c(k, l);
    b.sigma_c(k) = cfg.P_c_max / cfg.N0 * r * r;
    b.v_lower_bound -= std::log1p(b.sigma_c(k));
  }
  for (int n = 0; n < dm.Kd(); ++n) {
    const double r = std::abs(cs.estimate.g_d(n, n)) + cs.radii.g_d(n, n);
    b.sigma_d(n) = cfg.P_d_max / cfg.N0 * r * r;
    b.v_lower_bound -= std::log1p(b.sigma_d(n));
  }
  return b;
}

inline double surrogate_rate(double V) { return -V / std::numbers::ln2; }

/// Sum rate in bits with fixed receive filters W (one B x M matrix per cell).
inline RateReport sum_rate(const std::vector<Eigen::MatrixXcd>& W, const Eigen::VectorXd& q_c,
                           const Eigen::VectorXd& q_d, const LinkSet& ch, const Dims& dm, double n0) {
  RateReport r;
  r.per_link_sinr.resize(dm.Kc() + dm.Kd());
  for (int k = 0; k < dm.Kc(); ++k) {
    const double s = cellular_sinr(W[dm.cu_cell(k)].col(k % dm.M), q_c, q_d, ch, dm, k, n0);
    r.per_link_sinr(k) = s;
    r.cellular_sum_bits += std::log2(1.0 + s);
  }
  for (int n = 0; n < dm.Kd(); ++n) {
    const double s = d2d_sinr(q_c, q_d, ch.g_c, ch.g_d, n, n0);
    r.per_link_sinr(dm.Kc() + n) = s;
    r.d2d_sum_bits += std::log2(1.0 + s);
  }
  r.sum_rate_bits = r.cellular_sum_bits + r.d2d_sum_bits;
  return r;
}

/// Channel realization drawn uniformly from every link's uncertainty ball.
inline LinkSet sample_channels(const ChannelSet& cs, std::mt19937_64& rng) {
  LinkSet s = cs.estimate;
  for (std::size_t l = 0; l < s.h_c.size(); ++l) {
    for (Eigen::Index k = 0; k < s.h_c[l].cols(); ++k)
      s.h_c[l].col(k) += sample_ball(rng, static_cast<int>(s.h_c[l].rows()), cs.radii.h_c(k, l));
    for (Eigen::Index n = 0; n < s.h_d[l].cols(); ++n)
      s.h_d[l].col(n) += sample_ball(rng, static_cast<int>(s.h_d[l].rows()), cs.radii.h_d(n, l));
  }
  for (Eigen::Index n = 0; n < s.g_c.cols(); ++n) {
    for (Eigen::Index k = 0; k < s.g_c.rows(); ++k) s.g_c(k, n) += sample_ball(rng, 1, cs.radii.g_c(k, n))(0);
    for (Eigen::Index t = 0; t < s.g_d.rows(); ++t) s.g_d(t, n) += sample_ball(rng, 1, cs.radii.g_d(t, n))(0);
  }
  return s;
}

/// Lowest sum rate over n_samples joint draws from the uncertainty set, W and q fixed.
inline RateReport empirical_worst_rate(const std::vector<Eigen::MatrixXcd>& W, const Eigen::VectorXd& q_c,
                                       const Eigen::VectorXd& q_d, const ChannelSet& cs, const Dims& dm, double n0,
                                       int n_samples, std::mt19937_64& rng) {
  RateReport worst;
  worst.sum_rate_bits = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    const RateReport r = sum_rate(W, q_c, q_d, sample_channels(cs, rng), dm, n0);
    if (r.sum_rate_bits < worst.sum_rate_bits) worst = r;
  }
  return worst;
}

}  // namespace rtd
