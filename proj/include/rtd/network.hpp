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

// Topology, large/small-scale fading and the bounded CSI error model.
//
// Indexing: cellular user k = l * M + m belongs to cell l; D2D pair n = l * N + j
// belongs to cell l. BS l sees the columns of h_c[l] (B x LM) and h_d[l] (B x LN).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "rtd/config.hpp"
#include "rtd/rng.hpp"

namespace rtd {

using cplx = std::complex<double>;

struct Dims {
  int L = 0;
  int M = 0;
  int N = 0;
  int B = 0;

  static Dims of(const SystemConfig& c) { return {c.L, c.M, c.N, c.B}; }
  int Kc() const { return L * M; }
  int Kd() const { return L * N; }
  int cu_cell(int k) const { return k / M; }
  int d2d_cell(int n) const { return n / N; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Drop {
  std::vector<Point> bs_positions;      // L
  std::vector<Point> cu_positions;      // L*M
  std::vector<Point> d2d_tx_positions;  // L*N
  std::vector<Point> d2d_rx_positions;  // L*N
};

struct LinkSet {
  std::vector<Eigen::MatrixXcd> h_c;  // per BS: B x K_c
  std::vector<Eigen::MatrixXcd> h_d;  // per BS: B x K_d
  Eigen::MatrixXcd g_c;               // K_c x K_d, CU -> D2D receiver
  Eigen::MatrixXcd g_d;               // K_d x K_d, D2D transmitter -> D2D receiver (diagonal: own link)
};

struct ErrorRadii {
  Eigen::MatrixXd h_c;  // K_c x L
  Eigen::MatrixXd h_d;  // K_d x L
  Eigen::MatrixXd g_c;  // K_c x K_d
  Eigen::MatrixXd g_d;  // K_d x K_d
};

struct ChannelSet {
  LinkSet truth;
  LinkSet estimate;
  ErrorRadii radii;
};

inline constexpr int kMaxPlacementTries = 10000;

namespace detail {

// Uniform point in a disc around `c`, rejecting points closer than `min_dist` to `avoid`.
inline Point place_in_disc(std::mt19937_64& rng, const Point& c, double radius, const Point& avoid,
                           double min_dist, bool distance_uniform) {
  std::uniform_real_distribution<double> u01;
  for (int t = 0; t < kMaxPlacementTries; ++t) {
    const double u = u01(rng);
    const double r = radius * (distance_uniform ? u : std::sqrt(u));
    const double th = 2.0 * std::numbers::pi * u01(rng);
    const Point p{c.x + r * std::cos(th), c.y + r * std::sin(th)};
    if (distance(p, avoid) >= min_dist) return p;
  }
  throw std::runtime_error("generate_drop: placement retry cap exceeded (geometry infeasible)");
}

}  // namespace detail

/// Places BSs on a line, users uniformly in their cell disc and each D2D receiver at a
/// uniformly distributed distance in [0, D_max] from its transmitter.
inline Drop generate_drop(const SystemConfig& cfg, std::uint64_t drop_index) {
  cfg.validate();
  const StreamFactory sf(cfg.seed, drop_index);
  Drop d;
  for (int l = 0; l < cfg.L; ++l) d.bs_positions.push_back({l * cfg.inter_site_distance, 0.0});
  for (int l = 0; l < cfg.L; ++l) {
    const Point& bs = d.bs_positions[l];
    for (int m = 0; m < cfg.M; ++m) {
      auto rng = sf.stream(StreamTag::CuPosition, {std::uint64_t(l), std::uint64_t(m)});
      d.cu_positions.push_back(
          detail::place_in_disc(rng, bs, cfg.cell_radius, bs, cfg.min_bs_distance, false));
    }
  }
  for (int l = 0; l < cfg.L; ++l) {
    const Point& bs = d.bs_positions[l];
    for (int j = 0; j < cfg.N; ++j) {
      auto rt = sf.stream(StreamTag::D2dTxPosition, {std::uint64_t(l), std::uint64_t(j)});
      const Point tx = detail::place_in_disc(rt, bs, cfg.cell_radius, bs, cfg.min_bs_distance, false);
      Point rx = tx;
      if (cfg.D_max > 0.0) {
        auto rr = sf.stream(StreamTag::D2dRxPosition, {std::uint64_t(l), std::uint64_t(j)});
        rx = detail::place_in_disc(rr, tx, cfg.D_max, bs, cfg.min_bs_distance, true);
      }
      d.d2d_tx_positions.push_back(tx);
      d.d2d_rx_positions.push_back(rx);
    }
  }
  return d;
}

inline double pathloss_dB(double distance_m, const SystemConfig& cfg) {
  const double d = std::max(distance_m, 1.0);
  return cfg.pl_ref_dB + 10.0 * cfg.pathloss_exponent * std::log10(d);
}

/// Large-scale gain in dB: minus the path loss plus one log-normal shadowing draw from `rng`.
inline double link_gain_dB(double distance_m, const SystemConfig& cfg, std::mt19937_64& rng) {
  std::normal_distribution<double> shadow(0.0, 1.0);
  return -pathloss_dB(distance_m, cfg) + cfg.shadowing_sigma_dB * shadow(rng);
}

namespace detail {

enum class Node : std::uint64_t { Cu = 0, D2dTx = 1, Bs = 2, D2dRx = 3 };

inline std::mt19937_64 link_stream(const StreamFactory& sf, StreamTag tag, Node tx, int tl, int ti, Node rx,
                                   int rl, int ri) {
  return sf.stream(tag, {static_cast<std::uint64_t>(tx), static_cast<std::uint64_t>(tl),
                         static_cast<std::uint64_t>(ti), static_cast<std::uint64_t>(rx),
                         static_cast<std::uint64_t>(rl), static_cast<std::uint64_t>(ri)});
}

struct NodeId {
  Node kind;
  int cell;
  int index;
};

inline Eigen::VectorXcd draw_link(const StreamFactory& sf, const SystemConfig& cfg, const NodeId& tx,
                                  const NodeId& rx, double dist, int antennas) {
  auto rs = link_stream(sf, StreamTag::Shadowing, tx.kind, tx.cell, tx.index, rx.kind, rx.cell, rx.index);
  const double gain = std::pow(10.0, link_gain_dB(dist, cfg, rs) / 20.0);
  auto rf = link_stream(sf, StreamTag::SmallScale, tx.kind, tx.cell, tx.index, rx.kind, rx.cell, rx.index);
  std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
  Eigen::VectorXcd v(antennas);
  for (int b = 0; b < antennas; ++b) {
    const double re = n01(rf);
    v(b) = gain * cplx(re, n01(rf));
  }
  return v;
}

}  // namespace detail

/// Fading draw for every link class: sqrt(large-scale gain) times i.i.d. CN(0, 1) per antenna.
inline LinkSet generate_channels(const Drop& drop, const SystemConfig& cfg, const StreamFactory& sf) {
  using detail::Node;
  using detail::NodeId;
  const int L = cfg.L, M = cfg.M, N = cfg.N, B = cfg.B;
  const int Kc = L * M, Kd = L * N;
  LinkSet ls;
  ls.h_c.assign(L, Eigen::MatrixXcd(B, Kc));
  ls.h_d.assign(L, Eigen::MatrixXcd(B, Kd));
  ls.g_c.resize(Kc, Kd);
  ls.g_d.resize(Kd, Kd);
  auto cu = [&](int k) { return NodeId{Node::Cu, k / M, k % M}; };
  auto dtx = [&](int n) { return NodeId{Node::D2dTx, n / N, n % N}; };
  auto drx = [&](int n) { return NodeId{Node::D2dRx, n / N, n % N}; };
  for (int l = 0; l < L; ++l) {
    const NodeId bs{Node::Bs, l, 0};
    for (int k = 0; k < Kc; ++k)
      ls.h_c[l].col(k) =
          detail::draw_link(sf, cfg, cu(k), bs, distance(drop.cu_positions[k], drop.bs_positions[l]), B);
    for (int n = 0; n < Kd; ++n)
      ls.h_d[l].col(n) =
          detail::draw_link(sf, cfg, dtx(n), bs, distance(drop.d2d_tx_positions[n], drop.bs_positions[l]), B);
  }
  for (int n = 0; n < Kd; ++n) {
    for (int k = 0; k < Kc; ++k)
      ls.g_c(k, n) = detail::draw_link(sf, cfg, cu(k), drx(n),
                                       distance(drop.cu_positions[k], drop.d2d_rx_positions[n]), 1)(0);
    for (int s = 0; s < Kd; ++s)
      ls.g_d(s, n) = detail::draw_link(sf, cfg, dtx(s), drx(n),
                                       distance(drop.d2d_tx_positions[s], drop.d2d_rx_positions[n]), 1)(0);
  }
  return ls;
}

/// Uniform draw in the complex ball of radius eps around zero (real dimension 2n).
inline Eigen::VectorXcd sample_ball(std::mt19937_64& rng, int n, double eps) {
  if (eps == 0.0 || n == 0) return Eigen::VectorXcd::Zero(n);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  Eigen::VectorXcd v(n);
  double nv = 0.0;
  while (nv == 0.0) {
    for (int i = 0; i < n; ++i) {
      const double re = n01(rng);
      v(i) = cplx(re, n01(rng));
    }
    nv = v.norm();
  }
  const double r = eps * std::pow(u01(rng), 1.0 / (2.0 * n));
  return v * (r / nv);
}

/// Treats `fading` as the estimate, sets every radius to mu times the estimate norm and
/// draws the true channel uniformly in that ball.
inline ChannelSet apply_csi_error_model(const LinkSet& fading, const SystemConfig& cfg, double mu,
                                        const StreamFactory& sf) {
  using detail::Node;
  if (!(mu >= 0.0 && mu < 1.0)) throw std::invalid_argument("apply_csi_error_model: mu outside [0, 1)");
  const int L = cfg.L, M = cfg.M, N = cfg.N;
  const int Kc = L * M, Kd = L * N;
  ChannelSet cs;
  cs.estimate = fading;
  cs.truth = fading;
  cs.radii.h_c.resize(Kc, L);
  cs.radii.h_d.resize(Kd, L);
  cs.radii.g_c.resize(Kc, Kd);
  cs.radii.g_d.resize(Kd, Kd);
  auto perturb = [&](auto& target, double eps, Node tx, int txi, Node rx, int rl, int ri) {
    if (eps == 0.0) return;
    const int tl = tx == Node::Cu ? txi / M : txi / N;
    const int ti = tx == Node::Cu ? txi % M : txi % N;
    auto rng = detail::link_stream(sf, StreamTag::CsiError, tx, tl, ti, rx, rl, ri);
    target += sample_ball(rng, static_cast<int>(target.size()), eps);
  };
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < Kc; ++k) {
      const double eps = mu * fading.h_c[l].col(k).norm();
      cs.radii.h_c(k, l) = eps;
      Eigen::VectorXcd t = fading.h_c[l].col(k);
      perturb(t, eps, Node::Cu, k, Node::Bs, l, 0);
      cs.truth.h_c[l].col(k) = t;
    }
    for (int n = 0; n < Kd; ++n) {
      const double eps = mu * fading.h_d[l].col(n).norm();
      cs.radii.h_d(n, l) = eps;
      Eigen::VectorXcd t = fading.h_d[l].col(n);
      perturb(t, eps, Node::D2dTx, n, Node::Bs, l, 0);
      cs.truth.h_d[l].col(n) = t;
    }
  }
  for (int n = 0; n < Kd; ++n) {
    for (int k = 0; k < Kc; ++k) {
      const double eps = mu * std::abs(fading.g_c(k, n));
      cs.radii.g_c(k, n) = eps;
      Eigen::VectorXcd t(1);
      t(0) = fading.g_c(k, n);
      perturb(t, eps, Node::Cu, k, Node::D2dRx, n / N, n % N);
      cs.truth.g_c(k, n) = t(0);
    }
    for (int s = 0; s < Kd; ++s) {
      const double eps = mu * std::abs(fading.g_d(s, n));
      cs.radii.g_d(s, n) = eps;
      Eigen::VectorXcd t(1);
      t(0) = fading.g_d(s, n);
      perturb(t, eps, Node::D2dTx, s, Node::D2dRx, n / N, n % N);
      cs.truth.g_d(s, n) = t(0);
    }
  }
  return cs;
}

struct Scenario {
  SystemConfig config;
  Drop drop;
  ChannelSet channels;
};

/// Drop `drop_index` of the configuration's master seed, complete with CSI errors.
inline Scenario generate_scenario(const SystemConfig& cfg, std::uint64_t drop_index) {
  const StreamFactory sf(cfg.seed, drop_index);
  Scenario s{cfg, generate_drop(cfg, drop_index), {}};
  s.channels = apply_csi_error_model(generate_channels(s.drop, cfg, sf), cfg, cfg.mu, sf);
  return s;
}

/// Copy of `cs` with every radius zero and the estimate taken as truth.
inline ChannelSet without_uncertainty(const ChannelSet& cs) {
  ChannelSet out = cs;
  out.truth = cs.estimate;
  out.radii.h_c.setZero();
  out.radii.h_d.setZero();
  out.radii.g_c.setZero();
  out.radii.g_d.setZero();
  return out;
}

namespace detail {

inline void fnv_mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

template <typename Mat>
void fnv_matrix(std::uint64_t& h, const Mat& m) {
  const auto rows = static_cast<std::int64_t>(m.rows()), cols = static_cast<std::int64_t>(m.cols());
  fnv_mix(h, &rows, sizeof rows);
  fnv_mix(h, &cols, sizeof cols);
  fnv_mix(h, m.data(), sizeof(typename Mat::Scalar) * static_cast<std::size_t>(m.size()));
}

inline void fnv_links(std::uint64_t& h, const LinkSet& ls) {
  for (const auto& m : ls.h_c) fnv_matrix(h, m);
  for (const auto& m : ls.h_d) fnv_matrix(h, m);
  fnv_matrix(h, ls.g_c);
  fnv_matrix(h, ls.g_d);
}

}  // namespace detail

/// FNV-1a over the bit patterns of every channel and radius.
inline std::uint64_t channel_hash(const ChannelSet& cs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  detail::fnv_links(h, cs.estimate);
  detail::fnv_links(h, cs.truth);
  detail::fnv_matrix(h, cs.radii.h_c);
  detail::fnv_matrix(h, cs.radii.h_d);
  detail::fnv_matrix(h, cs.radii.g_c);
  detail::fnv_matrix(h, cs.radii.g_d);
  return h;
}

}  // namespace rtd
