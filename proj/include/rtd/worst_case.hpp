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

// Closed-form extremes over norm balls and the resulting worst-case D2D channels.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "rtd/network.hpp"

namespace rtd {

struct BallExtremum {
  double value = 0.0;     // extremal ||h + delta||^2
  Eigen::VectorXcd delta;  // the extremizer, ||delta|| <= eps
};

/// min over ||delta|| <= eps of ||h + delta||^2.
inline BallExtremum worst_norm_min(const Eigen::VectorXcd& h, double eps) {
  BallExtremum r;
  const double nh = h.norm();
  const double gap = std::max(nh - eps, 0.0);
  r.value = gap * gap;
  r.delta = nh > 0.0 ? Eigen::VectorXcd(-h * std::min(1.0, eps / nh)) : Eigen::VectorXcd::Zero(h.size());
  return r;
}

/// max over ||delta|| <= eps of ||h + delta||^2. For h = 0 the extremizer points along the first axis.
inline BallExtremum worst_norm_max(const Eigen::VectorXcd& h, double eps) {
  BallExtremum r;
  const double nh = h.norm();
  r.value = (nh + eps) * (nh + eps);
  if (nh > 0.0) {
    r.delta = h * (eps / nh);
  } else {
    r.delta = Eigen::VectorXcd::Zero(h.size());
    if (h.size() > 0) r.delta(0) = eps;
  }
  return r;
}

/// Desired D2D coefficient shrunk towards zero along its own phase.
inline cplx shrink_own(cplx g, double eps) {
  const double a = std::abs(g);
  if (a == 0.0) return {0.0, 0.0};
  return g - g * std::min(1.0, eps / a);
}

/// Interfering coefficient grown along its own phase; phase 0 for a zero estimate.
inline cplx grow_cross(cplx g, double eps) {
  const double a = std::abs(g);
  if (a == 0.0) return {eps, 0.0};
  return g * (1.0 + eps / a);
}

struct WorstCaseD2DChannels {
  Eigen::MatrixXcd g_c;  // K_c x K_d, every entry grown
  Eigen::MatrixXcd g_d;  // K_d x K_d, diagonal shrunk (own link), off-diagonal grown

  cplx own(int n) const { return g_d(n, n); }
};

inline WorstCaseD2DChannels worst_case_d2d_channels(const LinkSet& est, const ErrorRadii& radii) {
  WorstCaseD2DChannels wc;
  wc.g_c = est.g_c;
  wc.g_d = est.g_d;
  for (Eigen::Index n = 0; n < est.g_c.cols(); ++n)
    for (Eigen::Index k = 0; k < est.g_c.rows(); ++k) wc.g_c(k, n) = grow_cross(est.g_c(k, n), radii.g_c(k, n));
  for (Eigen::Index n = 0; n < est.g_d.cols(); ++n)
    for (Eigen::Index s = 0; s < est.g_d.rows(); ++s)
      wc.g_d(s, n) = s == n ? shrink_own(est.g_d(s, n), radii.g_d(s, n)) : grow_cross(est.g_d(s, n), radii.g_d(s, n));
  return wc;
}

/// Worst-case interference power gain (||h|| + eps)^2 of a D2D transmitter at a BS.
inline double interference_weight_rho(const Eigen::VectorXcd& h, double eps) {
  const double r = h.norm() + eps;
  return r * r;
}

/// rho for every (D2D transmitter, BS) pair: K_d x L.
inline Eigen::MatrixXd interference_weights(const LinkSet& est, const ErrorRadii& radii) {
  const Eigen::Index L = static_cast<Eigen::Index>(est.h_d.size());
  const Eigen::Index Kd = radii.h_d.rows();
  Eigen::MatrixXd rho(Kd, L);
  for (Eigen::Index l = 0; l < L; ++l)
    for (Eigen::Index n = 0; n < Kd; ++n) rho(n, l) = interference_weight_rho(est.h_d[l].col(n), radii.h_d(n, l));
  return rho;
}

}  // namespace rtd
