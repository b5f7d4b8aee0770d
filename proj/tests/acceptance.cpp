// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as arguments to run a
// subset. The exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "robust_check.hpp"
#include "rtd.hpp"

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

rtd::SystemConfig desk() { return rtd::SystemConfig{}; }

// 1. MMSE of the optimal linear receiver equals 1 / (1 + SINR).
Outcome mmse_sinr_identity() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> pw(0.05, 2.0);
  double worst = 0.0, worst_oracle = 0.0;
  for (int t = 0; t < 200; ++t) {
    const rtd::Dims dm{1 + t % 2, 1 + (t / 2) % 2, 1 + (t / 4) % 3, 0};
    rtd::Dims d = dm;
    d.B = std::max(d.M, 1 + (t / 12) % 4);
    const rtd::ChannelSet cs = fixtures::random_channel_set(rng, d, 0.3);
    const VectorXd q_c = fixtures::random_amplitudes(rng, d.Kc(), 0.2, 1.5);
    const VectorXd q_d = fixtures::random_amplitudes(rng, d.Kd(), 0.2, 1.5);
    const double n0 = pw(rng);
    const auto& ch = cs.estimate;
    for (int k = 0; k < d.Kc(); ++k) {
      const int l = d.cu_cell(k);
      const VectorXcd w = rtd::mmse_filter_bs(ch, q_c, q_d, d, k, n0);
      MatrixXcd J = MatrixXcd::Zero(d.B, d.M);
      J.col(k % d.M) = w;
      const double mse = rtd::cellular_mse(J, VectorXd::Ones(d.M), q_c, q_d, ch, d, l, n0).plain(k % d.M);
      const double sinr = rtd::cellular_sinr(w, q_c, q_d, ch, d, k, n0);
      worst = std::max(worst, std::abs(mse - 1.0 / (1.0 + sinr)));
      // Independent expectation form with all transmitters seen by BS l.
      std::vector<VectorXcd> h;
      std::vector<double> p;
      for (int i = 0; i < d.Kc(); ++i) {
        h.push_back(ch.h_c[l].col(i));
        p.push_back(q_c(i) * q_c(i));
      }
      for (int s = 0; s < d.Kd(); ++s) {
        h.push_back(ch.h_d[l].col(s));
        p.push_back(q_d(s) * q_d(s));
      }
      worst_oracle = std::max(worst_oracle, std::abs(oracle::expectation_mse(w, h, p, k, n0) - mse));
    }
    const auto wc = rtd::worst_case_d2d_channels(ch, cs.radii);
    for (int n = 0; n < d.Kd(); ++n) {
      const rtd::cplx f = rtd::mmse_filter_d2d(q_c, q_d, wc, n, n0);
      const double mse = rtd::d2d_mse(f, q_c, q_d, wc.g_c, wc.g_d, n, n0);
      worst = std::max(worst, std::abs(mse - 1.0 / (1.0 + rtd::d2d_sinr(q_c, q_d, wc.g_c, wc.g_d, n, n0))));
    }
  }
  return {worst <= 1e-9 && worst_oracle <= 1e-9,
          "200 instances, worst |MMSE - 1/(1+SINR)| " + fmt("%.2e", worst) + ", vs expectation oracle " +
              fmt("%.2e", worst_oracle) + " (tol 1e-9)"};
}

// 2. Closed-form extrema of ||h + d||^2 over the ball.
Outcome ball_extrema() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  double bound_violation = 0.0, attain = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 4;
    const VectorXcd h = oracle::cn_vector(rng, n);
    const double eps = u(rng) * h.norm();
    const auto lo = rtd::worst_norm_min(h, eps);
    const auto hi = rtd::worst_norm_max(h, eps);
    attain = std::max({attain, std::abs((h + lo.delta).squaredNorm() - lo.value),
                       std::abs((h + hi.delta).squaredNorm() - hi.value), lo.delta.norm() - eps - 1e-15,
                       hi.delta.norm() - eps - 1e-15});
    for (int s = 0; s < 10000; ++s) {
      const double v = (h + oracle::ball_sample(rng, n, eps)).squaredNorm();
      bound_violation = std::max({bound_violation, lo.value - v, v - hi.value});
    }
  }
  return {bound_violation <= 1e-12 && attain <= 1e-12,
          "100 pairs x 1e4 samples, worst bound violation " + fmt("%.2e", bound_violation) + ", extremizer error " +
              fmt("%.2e", attain) + " (tol 1e-12)"};
}

// 3. Every LMI problem built along real runs: points between the start and the optimum satisfy the
// robust constraints at 100 sampled uncertainties each.
Outcome robust_soundness() {
  std::mt19937_64 rng(1003);
  long checked = 0, violations = 0, problems = 0, infeasible = 0, unsolved = 0;
  double worst = -1e300;
  auto check = [&](const rtd::conic::ConicProblem& p, const std::function<std::vector<robust_check::Unlifted>(
                                                         const VectorXd&)>& decode) {
    auto rep = rtd::conic::solve(p);
    if (rep.status == rtd::conic::SolveStatus::MaxIter) {
      // Same single retry the alternating loop performs.
      rtd::conic::SolverOptions loose;
      loose.tol_gap *= 10.0;
      rep = rtd::conic::solve(p, loose);
    }
    ++problems;
    if (rep.status != rtd::conic::SolveStatus::Optimal) ++unsolved;
    std::vector<VectorXd> pts{p.start, 0.5 * (p.start + rep.x_star), rep.x_star};
    for (const VectorXd& x : pts) {
      if (!rtd::conic::check_feasible(p, x).feasible(0.0)) {
        ++infeasible;
        continue;
      }
      for (const auto& u : decode(x)) {
        const double e = robust_check::sampled_excess(u, rng, 100);
        worst = std::max(worst, e);
        ++checked;
        if (e > 1e-8) ++violations;
      }
    }
  };
  for (int s = 0; s < 20; ++s) {
    rtd::SystemConfig cfg = desk();
    cfg.mu = 0.1 + 0.1 * (s % 5);
    const auto sc = rtd::generate_scenario(cfg, static_cast<std::uint64_t>(100 + s));
    const auto md = rtd::normalized(rtd::make_robust_model(cfg, sc.channels));
    VectorXd q_c, q_d;
    rtd::initialize_powers(cfg, sc.channels, q_c, q_d);
    rtd::DesignState st;
    st.q_c = q_c / std::sqrt(cfg.P_c_max);
    st.q_d = q_d / std::sqrt(cfg.P_d_max);
    rtd::RtdOptions opts;
    int retries = 0;
    for (int it = 1; it <= 1 + s % 3; ++it) rtd::rtd_iterate(md, st, opts, it, retries);
    for (int l = 0; l < cfg.L; ++l) {
      for (auto mode : {rtd::ReceiveMode::Joint, rtd::ReceiveMode::FixedDirections, rtd::ReceiveMode::Frozen}) {
        const MatrixXcd W = st.W(l);
        const auto b = mode == rtd::ReceiveMode::FixedDirections
                           ? rtd::build_receive_problem(md, st.q_c, st.q_d, l, mode, &W)
                           : rtd::build_receive_problem(md, st.q_c, st.q_d, l, mode, &st.J[l], &st.gamma[l]);
        check(b.problem, [&](const VectorXd& x) {
          return robust_check::receive_constraints(md, st.q_c, st.q_d, b.layout, x);
        });
      }
      const auto cold = rtd::build_receive_design(md, st.q_c, st.q_d, l);
      check(cold.problem,
            [&](const VectorXd& x) { return robust_check::receive_constraints(md, st.q_c, st.q_d, cold.layout, x); });
    }
    const rtd::PowerStageInputs in{st.J, st.gamma, st.f, (0.5 * (st.u_d.array() - 1.0)).exp().matrix()};
    for (int k = 0; k < md.dm.Kc(); ++k) {
      const auto b = rtd::build_cu_power(md, in, k, st.q_c(k));
      check(b.problem, [&](const VectorXd& x) { return robust_check::cu_power_constraints(md, in, k, b.layout, x); });
    }
    const auto dd = rtd::build_d2d_power(md, in, &st.q_d);
    check(dd.problem, [&](const VectorXd& x) { return robust_check::d2d_power_constraints(md, in, dd.layout, x); });
  }
  std::ostringstream os;
  os << "20 scenarios, " << problems << " problems, " << checked << " constraints x 100 draws, " << violations
     << " violations beyond 1e-8 (worst excess " << fmt("%.2e", worst) << "), " << infeasible
     << " points outside the feasible set, " << unsolved << " unsolved after retry";
  return {violations == 0 && infeasible == 0 && unsolved == 0 && checked > 0, os.str()};
}

// 4. Descent, lower bound and convergence within 30 iterations on the desk configuration.
Outcome descent_and_convergence() {
  std::ostringstream os;
  bool pass = true;
  for (double mu : {0.0, 0.3, 0.5}) {
    rtd::SystemConfig cfg = desk();
    cfg.mu = mu;
    int rises = 0, below = 0, slow = 0, failed = 0, max_iters = 0;
    std::vector<int> iters;
    for (int d = 0; d < 50; ++d) {
      rtd::RtdOptions opts;
      opts.empirical_samples = 0;
      const auto r = rtd::run_rtd(cfg, rtd::generate_scenario(cfg, static_cast<std::uint64_t>(d)).channels, opts);
      if (r.status == rtd::RtdStatus::SolverFailure) ++failed;
      for (std::size_t i = 1; i < r.v_trace.size(); ++i)
        if (r.v_trace[i] > r.v_trace[i - 1] + 1e-6 * (1.0 + std::abs(r.v_trace[i - 1]))) ++rises;
      for (double v : r.v_trace)
        if (v < r.v_lower_bound) ++below;
      if (r.status != rtd::RtdStatus::Converged || r.iters_used > 30) ++slow;
      iters.push_back(r.iters_used);
      max_iters = std::max(max_iters, r.iters_used);
    }
    std::sort(iters.begin(), iters.end());
    pass = pass && rises == 0 && below == 0 && slow == 0 && failed == 0;
    os << "mu=" << mu << ": rises " << rises << ", below bound " << below << ", not converged in 30 " << slow
       << "/50, solver failures " << failed << ", median iters " << iters[25] << ", max " << max_iters << "; ";
  }
  return {pass, os.str()};
}

// 5. With zero radii the robust and nominal designs are identical.
Outcome zero_radius_equivalence() {
  rtd::SystemConfig cfg = desk();
  cfg.mu = 0.0;
  int mismatches = 0;
  for (int d = 0; d < 3; ++d) {
    const auto sc = rtd::generate_scenario(cfg, static_cast<std::uint64_t>(d));
    rtd::RtdOptions opts;
    opts.eval_stream = static_cast<std::uint64_t>(d);
    const auto a = rtd::run_rtd(cfg, sc.channels, opts);
    const auto b = rtd::run_nonrobust(cfg, sc.channels, opts);
    bool same = a.v_trace == b.v_trace && a.state.q_c == b.state.q_c && a.state.q_d == b.state.q_d &&
                a.surrogate_rate_bits == b.surrogate_rate_bits &&
                a.empirical_worst_rate_bits == b.empirical_worst_rate_bits && a.status == b.status &&
                a.iters_used == b.iters_used;
    for (int l = 0; l < cfg.L; ++l) same = same && a.state.J[l] == b.state.J[l];
    if (!same) ++mismatches;
  }
  return {mismatches == 0, "3 drops, exact comparison, " + std::to_string(mismatches) + " mismatches"};
}

// 6. Trends of the Monte Carlo means.
Outcome trends() {
  namespace h = rtd::harness;
  std::ostringstream os;
  bool pass = true;

  // (a) rate vs CSI error radius, robust vs nominal
  h::SweepSpec a;
  a.base = desk();
  a.axis = h::Axis::mu;
  a.values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  a.drops = 100;
  a.variants = {h::Variant::Rtd, h::Variant::NonRobust};
  const auto ra = h::run_sweep(a);
  const auto ga = h::aggregate(ra);
  std::vector<double> rtd_mean;
  for (const auto& g : ga)
    if (g.variant == h::Variant::Rtd) rtd_mean.push_back(g.surrogate.mean);
  int decreasing = 0;
  for (std::size_t i = 1; i < rtd_mean.size(); ++i) decreasing += rtd_mean[i] <= rtd_mean[i - 1];
  const double frac_dec = static_cast<double>(decreasing) / (rtd_mean.size() - 1);
  double worst_win = 1.0;
  bool means_ok = true;
  std::ostringstream wins;
  for (std::size_t vi = 0; vi < a.values.size(); ++vi) {
    int win = 0, n = 0;
    double mr = 0.0, mn = 0.0;
    for (int d = 0; d < a.drops; ++d) {
      const auto& r = ra[(vi * a.drops + d) * 2];
      const auto& q = ra[(vi * a.drops + d) * 2 + 1];
      if (r.failed() || q.failed()) continue;
      ++n;
      win += r.surrogate_rate_bits >= q.surrogate_rate_bits;
      mr += r.surrogate_rate_bits;
      mn += q.surrogate_rate_bits;
    }
    const double w = n ? static_cast<double>(win) / n : 0.0;
    wins << " " << a.values[vi] << ":" << fmt("%.2f", mr / std::max(n, 1)) << "/" << fmt("%.2f", mn / std::max(n, 1))
         << "/" << fmt("%.2f", w);
    if (a.values[vi] >= 0.3 - 1e-12) {
      worst_win = std::min(worst_win, w);
      means_ok = means_ok && mr >= mn;
    }
  }
  const bool pa = frac_dec >= 0.7 && worst_win >= 0.8 && means_ok;
  pass = pass && pa;
  os << "(a) " << (pa ? "ok" : "FAILED") << ": robust mean non-increasing on " << decreasing << "/"
     << rtd_mean.size() - 1 << " steps, worst per-drop win rate at mu>=0.3 " << fmt("%.2f", worst_win)
     << " [mu:robust/nominal/win" << wins.str() << "]; ";

  // (b) sum rate with D2D pairs vs a cellular-only network at 10 dBm
  h::SweepSpec b;
  b.base = desk();
  b.axis = h::Axis::P_dBm;
  b.values = {10.0};
  b.drops = 100;
  b.variants = {h::Variant::Rtd, h::Variant::CellularOnly};
  const auto gb = h::aggregate(h::run_sweep(b));
  const double with_d2d = gb[0].surrogate.mean, cellular_only = gb[1].surrogate.mean;
  const double ratio = with_d2d / cellular_only;
  const bool pb = ratio >= 1.5;
  pass = pass && pb;
  os << "(b) " << (pb ? "ok" : "FAILED") << ": N=3 " << fmt("%.2f", with_d2d) << " vs N=0 " << fmt("%.2f", cellular_only)
     << " bits, ratio " << fmt("%.2f", ratio) << "; ";

  // (c) total and cellular rate vs number of D2D pairs at a = -80 dBm
  h::SweepSpec c;
  c.base = desk();
  c.base.a = rtd::dbm_to_watt(-80.0);
  c.axis = h::Axis::N;
  c.values = {0, 1, 2, 3, 4};
  c.drops = 100;
  const auto gc = h::aggregate(h::run_sweep(c));
  bool total_up = true, cell_down = true;
  std::ostringstream series;
  for (std::size_t i = 0; i < gc.size(); ++i) {
    series << " N=" << gc[i].axis_value << ":" << fmt("%.2f", gc[i].surrogate.mean) << "/"
           << fmt("%.2f", gc[i].cellular.mean);
    if (i == 0) continue;
    total_up = total_up && gc[i].surrogate.mean > gc[i - 1].surrogate.mean;
    cell_down = cell_down && gc[i].cellular.mean <= gc[i - 1].cellular.mean;
  }
  const bool pc = total_up && cell_down;
  pass = pass && pc;
  os << "(c) " << (pc ? "ok" : "FAILED") << ": total increasing " << (total_up ? "yes" : "no")
     << ", cellular non-increasing " << (cell_down ? "yes" : "no") << " [total/cellular" << series.str() << "]";
  return {pass, os.str()};
}

// 7. Solver analytic cases and grid agreement.
Outcome solver_cases() {
  const auto ex = rtd::validation::solver_examples();
  double worst_grid = 0.0;
  bool ok = ex.passed;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto p = fixtures::tiny_instance(seed);
    const auto rep = rtd::conic::solve(p);
    ok = ok && rep.status == rtd::conic::SolveStatus::Optimal;
    worst_grid = std::max(worst_grid, std::abs(rep.objective_value - fixtures::tiny_grid_optimum(p)));
  }
  return {ok && worst_grid <= 1e-3,
          "analytic cases: " + ex.detail + "; grid agreement on 20 instances " + fmt("%.2e", worst_grid) + " (tol 1e-3)"};
}

// 8. Power-stage oracles.
Outcome power_oracles() {
  std::mt19937_64 rng(1008);
  rtd::RtdOptions opts;
  double worst_q = 0.0;
  for (int t = 0; t < 50; ++t) {
    const rtd::Dims dm{1, 1, 1 + t % 3, 1 + t % 2};
    const auto cs = fixtures::random_channel_set(rng, dm, t < 25 ? 0.0 : 0.3);
    const auto md = robust_check::unit_model(cs, dm, 1e3);
    const auto in = robust_check::random_power_inputs(rng, dm);
    double C = 0.0;
    for (int n = 0; n < dm.Kd(); ++n) C += std::norm(in.gamma_d(n) * in.f(n) * md.wc.g_c(0, n));
    auto f = [&](double q) {
      VectorXcd c0(1);
      c0(0) = in.gamma[0](0);
      return C * q * q + oracle::max_affine_norm_sq(q * in.J[0], md.h_c[0].col(0), c0, md.eps_c(0, 0));
    };
    int retries = 0;
    const double q = rtd::update_cu_power(md, in, 0, 0.5, opts, 1, retries);
    worst_q = std::max(worst_q, std::abs(q - oracle::golden_section(f, 0.0, 1.0)));
  }
  double worst_cap = 0.0;
  for (double a : {1.0, 0.5, 0.1}) {
    rtd::RobustModel md;
    md.dm = {1, 1, 2, 1};
    md.q_c_max = VectorXd::Ones(1);
    md.q_d_max = VectorXd::Constant(2, 2.0);
    md.caps = VectorXd::Constant(1, a);
    md.h_c = {MatrixXcd::Zero(1, 1)};
    md.h_d = {MatrixXcd::Zero(1, 2)};
    md.eps_c = Eigen::MatrixXd::Zero(1, 1);
    md.eps_d = Eigen::MatrixXd::Zero(2, 1);
    md.wc.g_c = MatrixXcd::Zero(1, 2);
    md.wc.g_d = MatrixXcd::Identity(2, 2);
    md.rho = Eigen::MatrixXd::Ones(2, 1);
    const rtd::PowerStageInputs in{{MatrixXcd::Zero(1, 1)}, {VectorXd::Ones(1)}, VectorXcd::Ones(2), VectorXd::Ones(2)};
    int retries = 0;
    const VectorXd q = rtd::update_d2d_power(md, in, VectorXd::Constant(2, 0.1), opts, 1, retries);
    worst_cap = std::max({worst_cap, std::abs(q(0) - std::sqrt(a / 2.0)), std::abs(q(1) - std::sqrt(a / 2.0))});
  }
  return {worst_q <= 1e-4 && worst_cap <= 1e-4,
          "50 cellular instances vs golden section " + fmt("%.2e", worst_q) + ", symmetric cap case " +
              fmt("%.2e", worst_cap) + " (tol 1e-4)"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "MMSE-SINR identity", 10.0, mmse_sinr_identity},
      {2, "ball extrema", 10.0, ball_extrema},
      {3, "robust constraint soundness", 300.0, robust_soundness},
      {4, "descent, bound and convergence", 1800.0, descent_and_convergence},
      {5, "zero-radius equivalence", 60.0, zero_radius_equivalence},
      {6, "Monte Carlo trends", 7200.0, trends},
      {7, "solver cases", 60.0, solver_cases},
      {8, "power-stage oracles", 120.0, power_oracles},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all_pass = true;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    all_pass = all_pass && pass;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << " | " << c.name << " | " << o.detail
              << " | " << fmt("%.1f", secs) << " s of " << fmt("%.0f", c.budget_s) << " s budget"
              << (in_time ? "" : " (over budget)") << std::endl;
  }
  return all_pass ? 0 : 1;
}
