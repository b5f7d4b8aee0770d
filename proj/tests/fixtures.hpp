// Shared instance generators for the unit and acceptance tests.
#pragma once

#include <random>

#include "oracles.hpp"
#include "rtd/conic.hpp"
#include "rtd/network.hpp"

namespace fixtures {

/// Random problem with 2 or 3 variables in [-1, 1], a PSD quadratic objective and one 2x2 Hermitian LMI
/// that is strictly satisfied at the origin.
inline rtd::conic::ConicProblem tiny_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const int n = 2 + static_cast<int>(seed % 2);
  rtd::conic::ConicProblem p(n);
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = 0.7 * n01(rng);
  p.objective.Q = R * R.transpose();
  for (int i = 0; i < n; ++i) p.objective.c(i) = 2.0 * n01(rng);
  rtd::conic::LmiBlock blk(2);
  blk.constant.add(0, 0, 1.0);
  blk.constant.add(1, 1, 1.0);
  for (int v = 0; v < n; ++v) {
    auto& f = blk.coefficient(v);
    f.add(0, 0, 1.5 * n01(rng));
    f.add(1, 1, 1.5 * n01(rng));
    const double re = n01(rng);
    f.add(0, 1, rtd::conic::cplx(re, n01(rng)));
  }
  p.lmi_blocks.push_back(blk);
  p.lower.setConstant(-1.0);
  p.upper.setConstant(1.0);
  p.start.setZero();
  return p;
}

/// Dense grid-search optimum of a tiny instance (LMI checked through the 2x2 determinant test).
inline double tiny_grid_optimum(const rtd::conic::ConicProblem& p) {
  const auto& blk = p.lmi_blocks.front();
  std::vector<Eigen::MatrixXcd> F;
  F.push_back(blk.constant.dense(2));
  for (int v = 0; v < p.n_vars; ++v) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    for (const auto& [var, coef] : blk.terms)
      if (var == v) m = coef.dense(2);
    F.push_back(m);
  }
  auto f = [&](const Eigen::VectorXd& x) {
    Eigen::Matrix2cd m = F[0];
    for (int v = 0; v < p.n_vars; ++v) m += x(v) * F[v + 1];
    const double a = m(0, 0).real(), d = m(1, 1).real();
    if (a < 0.0 || d < 0.0 || a * d - std::norm(m(0, 1)) < 0.0) return std::numeric_limits<double>::infinity();
    return x.dot(p.objective.Q * x) + p.objective.c.dot(x) + p.objective.constant;
  };
  const int coarse = p.n_vars == 2 ? 401 : 81;
  const int fine = p.n_vars == 2 ? 81 : 33;
  return oracle::grid_minimize(f, p.lower, p.upper, coarse, fine);
}

/// Unit-scale random channels (CN(0, 1) entries times a per-link gain in [0.2, 1]) with radii mu * norm.
/// The true channel is drawn uniformly in each ball.
inline rtd::ChannelSet random_channel_set(std::mt19937_64& rng, const rtd::Dims& dm, double mu) {
  std::uniform_real_distribution<double> gain(0.2, 1.0);
  const int Kc = dm.Kc(), Kd = dm.Kd();
  rtd::ChannelSet cs;
  auto& e = cs.estimate;
  e.h_c.assign(dm.L, Eigen::MatrixXcd(dm.B, Kc));
  e.h_d.assign(dm.L, Eigen::MatrixXcd(dm.B, Kd));
  e.g_c.resize(Kc, Kd);
  e.g_d.resize(Kd, Kd);
  cs.radii.h_c.resize(Kc, dm.L);
  cs.radii.h_d.resize(Kd, dm.L);
  cs.radii.g_c.resize(Kc, Kd);
  cs.radii.g_d.resize(Kd, Kd);
  cs.truth = e;
  for (int l = 0; l < dm.L; ++l) {
    for (int k = 0; k < Kc; ++k) {
      e.h_c[l].col(k) = oracle::cn_vector(rng, dm.B, gain(rng));
      cs.radii.h_c(k, l) = mu * e.h_c[l].col(k).norm();
    }
    for (int n = 0; n < Kd; ++n) {
      e.h_d[l].col(n) = oracle::cn_vector(rng, dm.B, gain(rng));
      cs.radii.h_d(n, l) = mu * e.h_d[l].col(n).norm();
    }
  }
  for (int n = 0; n < Kd; ++n) {
    for (int k = 0; k < Kc; ++k) {
      e.g_c(k, n) = gain(rng) * oracle::cn(rng);
      cs.radii.g_c(k, n) = mu * std::abs(e.g_c(k, n));
    }
    for (int s = 0; s < Kd; ++s) {
      e.g_d(s, n) = (s == n ? 2.0 : 1.0) * gain(rng) * oracle::cn(rng);
      cs.radii.g_d(s, n) = mu * std::abs(e.g_d(s, n));
    }
  }
  cs.truth = e;
  for (int l = 0; l < dm.L; ++l) {
    for (int k = 0; k < Kc; ++k) cs.truth.h_c[l].col(k) += oracle::ball_sample(rng, dm.B, cs.radii.h_c(k, l));
    for (int n = 0; n < Kd; ++n) cs.truth.h_d[l].col(n) += oracle::ball_sample(rng, dm.B, cs.radii.h_d(n, l));
  }
  for (int n = 0; n < Kd; ++n) {
    for (int k = 0; k < Kc; ++k) cs.truth.g_c(k, n) += oracle::ball_sample(rng, 1, cs.radii.g_c(k, n))(0);
    for (int s = 0; s < Kd; ++s) cs.truth.g_d(s, n) += oracle::ball_sample(rng, 1, cs.radii.g_d(s, n))(0);
  }
  return cs;
}

inline Eigen::VectorXd random_amplitudes(std::mt19937_64& rng, int n, double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q(i) = u(rng);
  return q;
}

}  // namespace fixtures
