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

// Dense path-following barrier solver for small problems of the form
//
//   minimize    x'Qx + c'x + c0 - sum_i w_i ln x_{k_i}
//   subject to  F_b(x) = F_b0 + sum_v x_v F_bv  >= 0   (Hermitian LMI blocks)
//               g_j(x) = x'A_j x + a_j'x + a_j0 <= 0    (convex quadratics)
//               lo <= x <= hi
//
// Hermitian blocks are handled through the real embedding [[Re, -Im], [Im, Re]].

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rtd::conic {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct HermitianEntry {
  int row = 0;
  int col = 0;
  cplx value;
};

/// Hermitian matrix stored by its upper triangle. Duplicate positions add up.
struct SparseHermitian {
  std::vector<HermitianEntry> entries;

  void add(int row, int col, cplx value) {
    if (value == cplx(0.0, 0.0)) return;
    if (row > col) {
      std::swap(row, col);
      value = std::conj(value);
    }
    entries.push_back({row, col, value});
  }

  bool empty() const { return entries.empty(); }

  Eigen::MatrixXcd dense(int dim) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& e : entries) {
      if (e.row == e.col) {
        m(e.row, e.row) += e.value.real();
      } else {
        m(e.row, e.col) += e.value;
        m(e.col, e.row) += std::conj(e.value);
      }
    }
    return m;
  }
};

/// Affine Hermitian map x -> constant + sum_v x_v * coefficient_v.
struct LmiBlock {
  int dim = 0;
  SparseHermitian constant;
  std::vector<std::pair<int, SparseHermitian>> terms;

  LmiBlock() = default;
  explicit LmiBlock(int d) : dim(d) {}

  SparseHermitian& coefficient(int var) {
    for (auto& t : terms)
      if (t.first == var) return t.second;
    terms.emplace_back(var, SparseHermitian{});
    return terms.back().second;
  }

  Eigen::MatrixXcd evaluate(const Eigen::VectorXd& x) const {
    Eigen::MatrixXcd m = constant.dense(dim);
    for (const auto& [var, coef] : terms) m += x(var) * coef.dense(dim);
    return m;
  }
};

/// Convex quadratic x'Ax + a'x + a0 <= 0 with A symmetric PSD.
struct QuadraticConstraint {
  Eigen::MatrixXd A;
  Eigen::VectorXd a;
  double a0 = 0.0;

  double evaluate(const Eigen::VectorXd& x) const { return x.dot(A * x) + a.dot(x) + a0; }
};

struct Objective {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  double constant = 0.0;
  std::vector<std::pair<int, double>> log_terms;  // (variable, weight): -weight * ln x
};

struct ConicProblem {
  int n_vars = 0;
  Objective objective;
  std::vector<LmiBlock> lmi_blocks;
  std::vector<QuadraticConstraint> scalar_ineqs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd start;

  ConicProblem() = default;
  explicit ConicProblem(int n)
      : n_vars(n),
        lower(Eigen::VectorXd::Constant(n, -kInf)),
        upper(Eigen::VectorXd::Constant(n, kInf)),
        start(Eigen::VectorXd::Zero(n)) {
    objective.Q = Eigen::MatrixXd::Zero(n, n);
    objective.c = Eigen::VectorXd::Zero(n);
  }

  QuadraticConstraint& add_scalar_ineq() {
    QuadraticConstraint g;
    g.A = Eigen::MatrixXd::Zero(n_vars, n_vars);
    g.a = Eigen::VectorXd::Zero(n_vars);
    scalar_ineqs.push_back(std::move(g));
    return scalar_ineqs.back();
  }

  /// f0 at x; +inf outside the domain of the log terms.
  double objective_value(const Eigen::VectorXd& x) const {
    double f = x.dot(objective.Q * x) + objective.c.dot(x) + objective.constant;
    for (const auto& [var, w] : objective.log_terms) {
      if (!(x(var) > 0.0)) return kInf;
      f -= w * std::log(x(var));
    }
    return f;
  }
};

/// Real symmetric embedding of a Hermitian matrix.
inline Eigen::MatrixXd complex_to_real(const Eigen::MatrixXcd& h) {
  const Eigen::Index d = h.rows();
  Eigen::MatrixXd r(2 * d, 2 * d);
  r.topLeftCorner(d, d) = h.real();
  r.topRightCorner(d, d) = -h.imag();
  r.bottomLeftCorner(d, d) = h.imag();
  r.bottomRightCorner(d, d) = h.real();
  return r;
}

enum class SolveStatus { Optimal, MaxIter, Infeasible };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "?";
}

struct SolverOptions {
  double barrier_mu_factor = 10.0;
  double tol_gap = 1e-7;
  double tol_newton = 1e-9;
  int max_outer = 60;
  int max_newton = 50;
  double initial_t = 0.0;  // 0 picks t from the start point
};

struct SolveReport {
  Eigen::VectorXd x_star;
  double objective_value = kInf;
  SolveStatus status = SolveStatus::Infeasible;
  int newton_iters = 0;
  double duality_gap_proxy = kInf;
  double stationarity = kInf;  // relative residual of grad f0 + grad(barrier)/t at exit
  std::vector<double> stage_objectives;  // f0 after each centering
};

struct FeasibilityReport {
  double min_lmi_eigenvalue = kInf;
  int worst_block = -1;
  double min_scalar_slack = kInf;  // min over j of -g_j(x)
  int worst_scalar = -1;
  double max_box_violation = 0.0;
  int worst_box = -1;
  bool log_domain_ok = true;

  bool feasible(double tol) const {
    return log_domain_ok && min_lmi_eigenvalue >= -tol && min_scalar_slack >= -tol &&
           max_box_violation <= tol;
  }
  bool strictly_interior() const {
    return log_domain_ok && min_lmi_eigenvalue > 0.0 && min_scalar_slack > 0.0 &&
           max_box_violation < 0.0;
  }
};

/// Box violation is max(lo - x, x - hi) over finite bounds, so strictly interior points report < 0.
inline FeasibilityReport check_feasible(const ConicProblem& p, const Eigen::VectorXd& x) {
  FeasibilityReport rep;
  for (std::size_t b = 0; b < p.lmi_blocks.size(); ++b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p.lmi_blocks[b].evaluate(x),
                                                       Eigen::EigenvaluesOnly);
    const double e = es.eigenvalues().minCoeff();
    if (e < rep.min_lmi_eigenvalue) {
      rep.min_lmi_eigenvalue = e;
      rep.worst_block = static_cast<int>(b);
    }
  }
  for (std::size_t j = 0; j < p.scalar_ineqs.size(); ++j) {
    const double s = -p.scalar_ineqs[j].evaluate(x);
    if (s < rep.min_scalar_slack) {
      rep.min_scalar_slack = s;
      rep.worst_scalar = static_cast<int>(j);
    }
  }
  rep.max_box_violation = -kInf;
  for (int i = 0; i < p.n_vars; ++i) {
    double v = -kInf;
    if (std::isfinite(p.lower(i))) v = std::max(v, p.lower(i) - x(i));
    if (std::isfinite(p.upper(i))) v = std::max(v, x(i) - p.upper(i));
    if (v > rep.max_box_violation) {
      rep.max_box_violation = v;
      rep.worst_box = i;
    }
  }
  for (const auto& [var, w] : p.objective.log_terms)
    if (!(x(var) > 0.0)) rep.log_domain_ok = false;
  return rep;
}

/// Plain-text listing of a problem, one matrix per section.
inline void write_problem(std::ostream& os, const ConicProblem& p) {
  const auto flags = os.flags();
  os << std::setprecision(17);
  os << "n_vars " << p.n_vars << "\n";
  os << "objective_constant " << p.objective.constant << "\n";
  os << "Q\n" << p.objective.Q << "\n";
  os << "c\n" << p.objective.c.transpose() << "\n";
  os << "log_terms " << p.objective.log_terms.size() << "\n";
  for (const auto& [var, w] : p.objective.log_terms) os << var << " " << w << "\n";
  os << "lower\n" << p.lower.transpose() << "\n";
  os << "upper\n" << p.upper.transpose() << "\n";
  os << "start\n" << p.start.transpose() << "\n";
  os << "lmi_blocks " << p.lmi_blocks.size() << "\n";
  auto dump = [&os](const SparseHermitian& h) {
    os << h.entries.size() << "\n";
    for (const auto& e : h.entries)
      os << e.row << " " << e.col << " " << e.value.real() << " " << e.value.imag() << "\n";
  };
  for (std::size_t b = 0; b < p.lmi_blocks.size(); ++b) {
    const auto& blk = p.lmi_blocks[b];
    os << "block " << b << " dim " << blk.dim << " terms " << blk.terms.size() << "\n";
    os << "constant ";
    dump(blk.constant);
    for (const auto& [var, coef] : blk.terms) {
      os << "var " << var << " ";
      dump(coef);
    }
  }
  os << "scalar_ineqs " << p.scalar_ineqs.size() << "\n";
  for (const auto& g : p.scalar_ineqs) {
    os << "A\n" << g.A << "\na\n" << g.a.transpose() << "\na0 " << g.a0 << "\n";
  }
  os.flags(flags);
}

namespace detail {

struct RealEntry {
  int i;
  int j;
  double v;
};

inline void embed_entry(const HermitianEntry& e, int d, std::vector<RealEntry>& out) {
  const double re = e.value.real();
  const double im = e.value.imag();
  const int r = e.row;
  const int c = e.col;
  if (r == c) {
    if (re != 0.0) {
      out.push_back({r, r, re});
      out.push_back({d + r, d + r, re});
    }
    return;
  }
  if (re != 0.0) {
    out.push_back({r, c, re});
    out.push_back({c, r, re});
    out.push_back({d + r, d + c, re});
    out.push_back({d + c, d + r, re});
  }
  if (im != 0.0) {
    out.push_back({d + r, c, im});
    out.push_back({c, d + r, im});
    out.push_back({r, d + c, -im});
    out.push_back({d + c, r, -im});
  }
}

struct CompiledBlock {
  int D = 0;
  Eigen::MatrixXd F0;
  std::vector<int> vars;
  std::vector<std::vector<RealEntry>> coef;
};

struct Workspace {
  Eigen::MatrixXd S;
  Eigen::MatrixXd X;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

class BarrierSolver {
 public:
  BarrierSolver(const ConicProblem& p, const SolverOptions& o) : p_(p), opt_(o) {
    blocks_.reserve(p.lmi_blocks.size());
    for (const auto& blk : p.lmi_blocks) {
      CompiledBlock cb;
      cb.D = 2 * blk.dim;
      std::vector<RealEntry> tmp;
      for (const auto& e : blk.constant.entries) embed_entry(e, blk.dim, tmp);
      cb.F0 = Eigen::MatrixXd::Zero(cb.D, cb.D);
      for (const auto& t : tmp) cb.F0(t.i, t.j) += t.v;
      for (const auto& [var, coef] : blk.terms) {
        std::vector<RealEntry> es;
        for (const auto& e : coef.entries) embed_entry(e, blk.dim, es);
        if (es.empty()) continue;
        cb.vars.push_back(var);
        cb.coef.push_back(std::move(es));
      }
      m_ += cb.D;
      blocks_.push_back(std::move(cb));
    }
    ws_.resize(blocks_.size());
    m_ += static_cast<double>(p.scalar_ineqs.size());
    for (int i = 0; i < p.n_vars; ++i) {
      if (std::isfinite(p.lower(i))) m_ += 1.0;
      if (std::isfinite(p.upper(i))) m_ += 1.0;
    }
    q2_ = 2.0 * p.objective.Q;
  }

  SolveReport run() {
    SolveReport rep;
    const int n = p_.n_vars;
    Eigen::VectorXd x = p_.start;
    rep.x_star = x;
    double bar = barrier_value(x);
    double f0 = p_.objective_value(x);
    if (!std::isfinite(bar) || !std::isfinite(f0)) {
      rep.status = SolveStatus::Infeasible;
      return rep;
    }
    if (m_ == 0.0) m_ = 1.0;
    double t = opt_.initial_t > 0.0 ? opt_.initial_t : m_ / std::max(1.0, std::abs(f0));
    t = std::max(t, 1e-3);

    Eigen::VectorXd g(n), dx(n);
    Eigen::MatrixXd H(n, n);
    for (int outer = 0; outer < opt_.max_outer; ++outer) {
      const bool last_stage = m_ / t < opt_.tol_gap;
      bool centered = false;
      for (int k = 0; k < opt_.max_newton; ++k) {
        derivatives(x, t, g, H);
        const double lambda2 = newton_step(H, g, dx);
        if (lambda2 / 2.0 <= opt_.tol_newton) {
          centered = true;
          break;
        }
        ++rep.newton_iters;
        if (!line_search(x, dx, g, lambda2, t)) {
          // No representable progress; accept when the decrement is at roundoff level.
          centered = lambda2 / 2.0 <= std::max(opt_.tol_newton, 1e-14 * t);
          break;
        }
      }
      if (centered && last_stage) {
        // A few pure Newton steps shrink the residual below the decrement test.
        for (int k = 0; k < 3 && stationarity(x, t) > 10.0 * opt_.tol_newton; ++k) {
          derivatives(x, t, g, H);
          const double lambda2 = newton_step(H, g, dx);
          if (!line_search(x, dx, g, lambda2, t)) break;
          ++rep.newton_iters;
        }
      }
      rep.x_star = x;
      rep.objective_value = p_.objective_value(x);
      rep.duality_gap_proxy = m_ / t;
      rep.stationarity = stationarity(x, t);
      rep.stage_objectives.push_back(rep.objective_value);
      if (!centered) {
        rep.status = SolveStatus::MaxIter;
        return rep;
      }
      if (last_stage) {
        rep.status = SolveStatus::Optimal;
        return rep;
      }
      t *= opt_.barrier_mu_factor;
    }
    rep.status = SolveStatus::MaxIter;
    return rep;
  }

 private:
  // Componentwise |df0 + dphi/t| relative to the size of the two balanced terms.
  double stationarity(const Eigen::VectorXd& x, double t) {
    const int n = p_.n_vars;
    Eigen::VectorXd g0 = q2_ * x + p_.objective.c;
    for (const auto& [var, w] : p_.objective.log_terms) g0(var) -= w / x(var);
    Eigen::VectorXd gb = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd mag = Eigen::VectorXd::Zero(n);
    auto acc = [&](int i, double v) {
      gb(i) += v;
      mag(i) += std::abs(v);
    };
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (!factor_block(b, x)) return kInf;
      const auto& cb = blocks_[b];
      const Eigen::MatrixXd X = ws_[b].llt.solve(Eigen::MatrixXd::Identity(cb.D, cb.D));
      for (std::size_t a = 0; a < cb.vars.size(); ++a) {
        double s = 0.0;
        for (const auto& e : cb.coef[a]) s += e.v * X(e.i, e.j);
        acc(cb.vars[a], -s);
      }
    }
    for (const auto& gq : p_.scalar_ineqs) {
      const Eigen::VectorXd dg = (2.0 * gq.A * x + gq.a) / (-gq.evaluate(x));
      for (int i = 0; i < n; ++i) acc(i, dg(i));
    }
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(p_.lower(i))) acc(i, -1.0 / (x(i) - p_.lower(i)));
      if (std::isfinite(p_.upper(i))) acc(i, 1.0 / (p_.upper(i) - x(i)));
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = std::abs(g0(i) + gb(i) / t) / (1.0 + std::abs(g0(i)) + mag(i) / t);
      worst = std::max(worst, r);
    }
    return worst;
  }

  // -log det of every block, -log(-g) of every scalar, box logs; +inf when outside.
  double barrier_value(const Eigen::VectorXd& x) {
    double v = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (!factor_block(b, x)) return kInf;
      const auto& L = ws_[b].llt.matrixLLT();
      for (int i = 0; i < blocks_[b].D; ++i) v -= 2.0 * std::log(L(i, i));
    }
    for (const auto& gq : p_.scalar_ineqs) {
      const double gv = gq.evaluate(x);
      if (!(gv < 0.0)) return kInf;
      v -= std::log(-gv);
    }
    for (int i = 0; i < p_.n_vars; ++i) {
      if (std::isfinite(p_.lower(i))) {
        const double s = x(i) - p_.lower(i);
        if (!(s > 0.0)) return kInf;
        v -= std::log(s);
      }
      if (std::isfinite(p_.upper(i))) {
        const double s = p_.upper(i) - x(i);
        if (!(s > 0.0)) return kInf;
        v -= std::log(s);
      }
    }
    return v;
  }

  bool factor_block(std::size_t b, const Eigen::VectorXd& x) {
    const auto& cb = blocks_[b];
    auto& w = ws_[b];
    w.S = cb.F0;
    for (std::size_t k = 0; k < cb.vars.size(); ++k) {
      const double xv = x(cb.vars[k]);
      if (xv == 0.0) continue;
      for (const auto& e : cb.coef[k]) w.S(e.i, e.j) += xv * e.v;
    }
    w.llt.compute(w.S);
    if (w.llt.info() != Eigen::Success) return false;
    const auto& L = w.llt.matrixLLT();
    for (int i = 0; i < cb.D; ++i)
      if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return false;
    return true;
  }

  // f0(x + a d) - f0(x) without forming either value, so the merit test is not lost to cancellation.
  double objective_change(const Eigen::VectorXd& x, const Eigen::VectorXd& d, double a) const {
    const Eigen::VectorXd qd = p_.objective.Q * d;
    double v = a * (2.0 * x.dot(qd) + p_.objective.c.dot(d)) + a * a * d.dot(qd);
    for (const auto& [var, w] : p_.objective.log_terms) {
      const double xn = x(var) + a * d(var);
      if (!(xn > 0.0)) return kInf;
      v -= w * std::log1p(a * d(var) / x(var));
    }
    return v;
  }

  void derivatives(const Eigen::VectorXd& x, double t, Eigen::VectorXd& g, Eigen::MatrixXd& H) {
    const int n = p_.n_vars;
    g = t * (q2_ * x + p_.objective.c);
    H = t * q2_;
    for (const auto& [var, w] : p_.objective.log_terms) {
      g(var) -= t * w / x(var);
      H(var, var) += t * w / (x(var) * x(var));
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      factor_block(b, x);
      const auto& cb = blocks_[b];
      auto& w = ws_[b];
      w.X = w.llt.solve(Eigen::MatrixXd::Identity(cb.D, cb.D));
      const auto& X = w.X;
      const std::size_t nv = cb.vars.size();
      for (std::size_t a = 0; a < nv; ++a) {
        double s = 0.0;
        for (const auto& e : cb.coef[a]) s += e.v * X(e.i, e.j);
        g(cb.vars[a]) -= s;
        for (std::size_t c = a; c < nv; ++c) {
          double h = 0.0;
          for (const auto& ea : cb.coef[a])
            for (const auto& ec : cb.coef[c]) h += ea.v * ec.v * X(ea.j, ec.i) * X(ec.j, ea.i);
          H(cb.vars[a], cb.vars[c]) += h;
          if (c != a) H(cb.vars[c], cb.vars[a]) += h;
        }
      }
    }
    for (const auto& gq : p_.scalar_ineqs) {
      const double gv = gq.evaluate(x);
      const Eigen::VectorXd dg = 2.0 * gq.A * x + gq.a;
      const double s = -gv;
      g += dg / s;
      H += dg * dg.transpose() / (s * s) + 2.0 * gq.A / s;
    }
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(p_.lower(i))) {
        const double s = x(i) - p_.lower(i);
        g(i) -= 1.0 / s;
        H(i, i) += 1.0 / (s * s);
      }
      if (std::isfinite(p_.upper(i))) {
        const double s = p_.upper(i) - x(i);
        g(i) += 1.0 / s;
        H(i, i) += 1.0 / (s * s);
      }
    }
  }

  // Solves H dx = -g with Jacobi scaling; returns the squared Newton decrement.
  double newton_step(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, Eigen::VectorXd& dx) {
    const int n = p_.n_vars;
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = H(i, i) > 0.0 ? 1.0 / std::sqrt(H(i, i)) : 1.0;
    Eigen::MatrixXd Hs = d.asDiagonal() * H * d.asDiagonal();
    const Eigen::VectorXd gs = d.cwiseProduct(g);
    Eigen::LLT<Eigen::MatrixXd> llt(Hs);
    Eigen::VectorXd ys;
    if (llt.info() == Eigen::Success) {
      ys = -llt.solve(gs);
    } else {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(Hs);
      ys = -ldlt.solve(gs);
    }
    dx = d.cwiseProduct(ys);
    return std::max(0.0, -g.dot(dx));
  }

  bool line_search(Eigen::VectorXd& x, const Eigen::VectorXd& dx, const Eigen::VectorXd& g,
                   double lambda2, double t) {
    constexpr double kArmijo = 0.01;
    constexpr double kShrink = 0.5;
    double alpha = 1.0;
    // Stay strictly inside finite boxes and the log domain.
    for (int i = 0; i < p_.n_vars; ++i) {
      if (dx(i) < 0.0 && std::isfinite(p_.lower(i)))
        alpha = std::min(alpha, 0.99 * (p_.lower(i) - x(i)) / dx(i));
      if (dx(i) > 0.0 && std::isfinite(p_.upper(i)))
        alpha = std::min(alpha, 0.99 * (p_.upper(i) - x(i)) / dx(i));
    }
    for (const auto& [var, w] : p_.objective.log_terms)
      if (dx(var) < 0.0) alpha = std::min(alpha, -0.99 * x(var) / dx(var));
    // Inside the quadratic-convergence region a feasible step is taken without Armijo.
    const bool pure_newton = lambda2 < 0.0625;
    const double bar0 = pure_newton ? 0.0 : barrier_value(x);
    const double slope = g.dot(dx);
    for (int k = 0; k < 60; ++k) {
      Eigen::VectorXd xn = x + alpha * dx;
      if (pure_newton) {
        if (std::isfinite(barrier_value(xn)) && std::isfinite(p_.objective_value(xn))) {
          x = xn;
          return true;
        }
      } else {
        const double df = objective_change(x, dx, alpha);
        const double bar = barrier_value(xn);
        if (std::isfinite(df) && std::isfinite(bar) && t * df + (bar - bar0) <= kArmijo * alpha * slope) {
          x = xn;
          return true;
        }
      }
      alpha *= kShrink;
    }
    return false;
  }

  const ConicProblem& p_;
  SolverOptions opt_;
  std::vector<CompiledBlock> blocks_;
  std::vector<Workspace> ws_;
  Eigen::MatrixXd q2_;
  double m_ = 0.0;
};

}  // namespace detail

/// Path-following barrier method from the strictly feasible start stored in the problem.
inline SolveReport solve(const ConicProblem& problem, const SolverOptions& opts = {}) {
  if (problem.start.size() != problem.n_vars || problem.lower.size() != problem.n_vars ||
      problem.upper.size() != problem.n_vars)
    throw std::invalid_argument("conic::solve: inconsistent problem dimensions");
  detail::BarrierSolver solver(problem, opts);
  return solver.run();
}

}  // namespace rtd::conic
