// Test-side reference computations. Each one is written independently of the
// library code it checks.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline cplx cn(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
  const double re = n01(rng);
  return {re, n01(rng)};
}

inline VectorXcd cn_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * cn(rng);
  return v;
}

/// Uniform point in the complex ball of the given radius (real dimension 2n).
inline VectorXcd ball_sample(std::mt19937_64& rng, int n, double radius) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01;
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) {
    const double re = n01(rng);
    v(i) = cplx(re, n01(rng));
  }
  const double nv = v.norm();
  if (nv == 0.0) return VectorXcd::Zero(n);
  const double r = radius * std::pow(u01(rng), 1.0 / (2.0 * n));
  return v * (r / nv);
}

/// Point on the sphere of the given radius.
inline VectorXcd sphere_sample(std::mt19937_64& rng, int n, double radius) {
  VectorXcd v = ball_sample(rng, n, 1.0);
  while (v.norm() == 0.0) v = ball_sample(rng, n, 1.0);
  return v * (radius / v.norm());
}

/// Grid search over a box followed by three zoom levels; f returns +inf outside the feasible set.
inline double grid_minimize(const std::function<double(const VectorXd&)>& f, const VectorXd& lo,
                            const VectorXd& hi, int coarse, int fine) {
  const int n = static_cast<int>(lo.size());
  VectorXd best_x = lo;
  double best = std::numeric_limits<double>::infinity();
  VectorXd a = lo, b = hi;
  int pts = coarse;
  for (int level = 0; level < 4; ++level) {
    VectorXd step = (b - a) / (pts - 1);
    std::vector<int> idx(n, 0);
    VectorXd x(n);
    while (true) {
      for (int i = 0; i < n; ++i) x(i) = a(i) + step(i) * idx[i];
      const double v = f(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
      int k = 0;
      while (k < n && ++idx[k] == pts) idx[k++] = 0;
      if (k == n) break;
    }
    for (int i = 0; i < n; ++i) {
      a(i) = std::max(lo(i), best_x(i) - 4.0 * step(i));
      b(i) = std::min(hi(i), best_x(i) + 4.0 * step(i));
    }
    pts = fine;
  }
  return best;
}

/// Maximum of ||A^H (h + d) - c||^2 over ||d|| <= eps (trust-region subproblem via the secular equation).
inline double max_affine_norm_sq(const MatrixXcd& A, const VectorXcd& h, const VectorXcd& c, double eps) {
  const VectorXcd r0 = A.adjoint() * h - c;
  if (eps == 0.0) return r0.squaredNorm();
  // f(d) = d^H P d + 2 Re(v^H d) + |r0|^2 with P = A A^H, v = A r0.
  const MatrixXcd P = A * A.adjoint();
  const VectorXcd v = A * r0;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(P);
  const VectorXd s = es.eigenvalues();
  const VectorXcd z = es.eigenvectors().adjoint() * v;
  const int n = static_cast<int>(s.size());
  const double smax = s.maxCoeff();
  auto d_of = [&](double lam) {
    VectorXcd y(n);
    for (int i = 0; i < n; ++i) y(i) = z(i) / (lam - s(i));
    return y;
  };
  auto value = [&](const VectorXcd& y) {
    double f = r0.squaredNorm();
    for (int i = 0; i < n; ++i) f += s(i) * std::norm(y(i)) + 2.0 * (std::conj(z(i)) * y(i)).real();
    return f;
  };
  // Stationary points on the sphere satisfy (lam I - P) d = v with lam >= smax.
  double lo = smax, hi = smax + 1.0;
  while (d_of(hi).norm() > eps) hi = smax + 2.0 * (hi - smax);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (d_of(mid).norm() > eps) lo = mid; else hi = mid;
  }
  double best = value(d_of(hi));
  // Hard case: top eigenvector direction contributes the remaining radius.
  int top = 0;
  s.maxCoeff(&top);
  VectorXcd y = VectorXcd::Zero(n);
  for (int i = 0; i < n; ++i)
    if (i != top && s(i) < smax) y(i) = z(i) / (smax - s(i));
  const double rest = eps * eps - y.squaredNorm();
  if (rest >= 0.0) {
    for (double sign : {1.0, -1.0}) {
      VectorXcd yy = y;
      cplx ph = std::abs(z(top)) > 0.0 ? z(top) / std::abs(z(top)) : cplx(1.0, 0.0);
      yy(top) = sign * ph * std::sqrt(rest);
      best = std::max(best, value(yy));
    }
  }
  return best;
}

/// Golden-section minimization of a unimodal function on [a, b].
inline double golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// E|w^H y - x|^2 for y = sum_i sqrt(p_i) h_i x_i + n, unit-power symbols, the desired one being index k.
inline double expectation_mse(const VectorXcd& w, const std::vector<VectorXcd>& h, const std::vector<double>& p,
                              int k, double n0) {
  const int b = static_cast<int>(w.size());
  MatrixXcd R = n0 * MatrixXcd::Identity(b, b);
  for (std::size_t i = 0; i < h.size(); ++i) R += p[i] * h[i] * h[i].adjoint();
  const VectorXcd cross = std::sqrt(p[k]) * h[k];
  const cplx wr = (w.adjoint() * R * w)(0, 0);
  const cplx wc = (w.adjoint() * cross)(0, 0);
  return wr.real() - 2.0 * wc.real() + 1.0;
}

}  // namespace oracle
