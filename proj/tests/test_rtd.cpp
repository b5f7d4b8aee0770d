#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "rtd/algorithm.hpp"

using Eigen::MatrixXcd;
using Eigen::VectorXd;

namespace {

rtd::ChannelSet single_cell_d2d_only(double rho1, double rho2) {
  rtd::ChannelSet cs;
  auto& e = cs.estimate;
  e.h_c = {MatrixXcd::Constant(1, 1, 1e-5)};
  e.h_d = {MatrixXcd(1, 2)};
  e.h_d[0] << std::sqrt(rho1), std::sqrt(rho2);
  e.g_c = MatrixXcd::Constant(1, 2, 1e-6);
  e.g_d = MatrixXcd::Identity(2, 2) * 1e-5;
  cs.truth = e;
  cs.radii.h_c = Eigen::MatrixXd::Zero(1, 1);
  cs.radii.h_d = Eigen::MatrixXd::Zero(2, 1);
  cs.radii.g_c = Eigen::MatrixXd::Zero(1, 2);
  cs.radii.g_d = Eigen::MatrixXd::Zero(2, 2);
  return cs;
}

rtd::RtdOptions quick(int iters) {
  rtd::RtdOptions o;
  o.max_iters = iters;
  o.empirical_samples = 50;
  return o;
}

}  // namespace

TEST(InitializePowers, CapScaledD2dPower) {
  rtd::SystemConfig cfg;
  cfg.L = 1;
  cfg.M = 1;
  cfg.N = 2;
  cfg.B = 1;
  cfg.P_c_max = 0.1;
  cfg.P_d_max = 0.1;
  cfg.a = 1e-11;
  VectorXd q_c, q_d;
  rtd::initialize_powers(cfg, single_cell_d2d_only(1e-9, 3e-9), q_c, q_d);
  EXPECT_DOUBLE_EQ(q_c(0), std::sqrt(0.1));
  EXPECT_NEAR(q_d(0) * q_d(0), 2.5e-3, 1e-15);
  EXPECT_NEAR(q_d(1) * q_d(1), 2.5e-3, 1e-15);
  EXPECT_NEAR(1e-9 * q_d(0) * q_d(0) + 3e-9 * q_d(1) * q_d(1), 1e-11, 1e-24);
}

TEST(InitializePowers, InactiveCapKeepsFullPower) {
  rtd::SystemConfig cfg;
  cfg.L = 1;
  cfg.M = 1;
  cfg.N = 2;
  cfg.B = 1;
  VectorXd q_c, q_d;
  rtd::initialize_powers(cfg, single_cell_d2d_only(1e-14, 3e-14), q_c, q_d);
  EXPECT_DOUBLE_EQ(q_d(0), std::sqrt(cfg.P_d_max));
  EXPECT_DOUBLE_EQ(q_d(1), std::sqrt(cfg.P_d_max));
}

TEST(Options, ValidateRejectsBadValues) {
  rtd::RtdOptions o;
  o.max_iters = 0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
  o.max_iters = 5;
  o.rel_tol = 0.0;
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(RtdIterate, ScalarLinkReachesFullPowerAndMmseInOneIteration) {
  rtd::SystemConfig cfg;
  cfg.L = 1;
  cfg.M = 1;
  cfg.N = 0;
  cfg.B = 1;
  cfg.mu = 0.0;
  std::mt19937_64 rng(21);
  rtd::ChannelSet cs = fixtures::random_channel_set(rng, rtd::Dims::of(cfg), 0.0);
  cs.estimate.h_c[0] *= 3e-5;  // 20 dB SNR at full power
  cs.truth = cs.estimate;
  const auto res = rtd::run_rtd(cfg, cs, quick(10));
  ASSERT_EQ(res.status, rtd::RtdStatus::Converged);
  ASSERT_GE(res.v_trace.size(), 1u);
  const double snr = cfg.P_c_max / cfg.N0 * cs.estimate.h_c[0].squaredNorm();
  EXPECT_NEAR(res.v_trace.front(), -std::log1p(snr), 1e-6);
  EXPECT_NEAR(res.state.q_c(0), std::sqrt(cfg.P_c_max), 1e-6 * std::sqrt(cfg.P_c_max));
  EXPECT_EQ(res.iters_used, 2);
  EXPECT_NEAR(res.surrogate_rate_bits, std::log2(1.0 + snr), 1e-6);
}

TEST(RtdIterate, DescentBoundsBoxesAndCaps) {
  for (double mu : {0.0, 0.3}) {
    for (std::uint64_t drop = 0; drop < 3; ++drop) {
      rtd::SystemConfig cfg;
      cfg.mu = mu;
      const auto sc = rtd::generate_scenario(cfg, drop);
      const auto md = rtd::normalized(rtd::make_robust_model(cfg, sc.channels));
      const double v_lb = rtd::sinr_upper_bounds(cfg, sc.channels).v_lower_bound;
      VectorXd q_c, q_d;
      rtd::initialize_powers(cfg, sc.channels, q_c, q_d);
      rtd::DesignState st;
      st.q_c = q_c / std::sqrt(cfg.P_c_max);
      st.q_d = q_d / std::sqrt(cfg.P_d_max);
      const auto opts = quick(8);
      int retries = 0;
      double v_prev = std::numeric_limits<double>::infinity();
      for (int it = 1; it <= 8; ++it) {
        const double v = rtd::rtd_iterate(md, st, opts, it, retries);
        EXPECT_LE(v, v_prev + 1e-6 * (1.0 + std::abs(v_prev))) << "mu " << mu << " drop " << drop << " it " << it;
        EXPECT_GE(v, v_lb) << "mu " << mu << " drop " << drop;
        EXPECT_GE(st.q_c.minCoeff(), -1e-8);
        EXPECT_LE(st.q_c.maxCoeff(), 1.0 + 1e-8);
        EXPECT_GE(st.q_d.minCoeff(), -1e-8);
        EXPECT_LE(st.q_d.maxCoeff(), 1.0 + 1e-8);
        for (int l = 0; l < md.dm.L; ++l)
          EXPECT_LE(md.rho.col(l).dot(st.q_d.cwiseAbs2()), md.caps(l) * (1.0 + 1e-8)) << "mu " << mu << " it " << it;
        v_prev = v;
      }
    }
  }
}

TEST(RunRtd, ZeroRadiusMatchesNonRobustExactly) {
  rtd::SystemConfig cfg;
  cfg.mu = 0.0;
  const auto sc = rtd::generate_scenario(cfg, 4);
  const auto opts = quick(6);
  const auto a = rtd::run_rtd(cfg, sc.channels, opts);
  const auto b = rtd::run_nonrobust(cfg, sc.channels, opts);
  EXPECT_EQ(a.v_trace, b.v_trace);
  EXPECT_EQ(a.state.q_c, b.state.q_c);
  EXPECT_EQ(a.state.q_d, b.state.q_d);
  for (int l = 0; l < cfg.L; ++l) EXPECT_EQ(a.state.J[l], b.state.J[l]);
  EXPECT_EQ(a.surrogate_rate_bits, b.surrogate_rate_bits);
  EXPECT_EQ(a.empirical_worst_rate_bits, b.empirical_worst_rate_bits);
  EXPECT_EQ(a.status, b.status);
}

TEST(RunRtd, Deterministic) {
  rtd::SystemConfig cfg;
  const auto opts = quick(5);
  const auto a = rtd::run_rtd(cfg, rtd::generate_scenario(cfg, 7).channels, opts);
  const auto b = rtd::run_rtd(cfg, rtd::generate_scenario(cfg, 7).channels, opts);
  EXPECT_EQ(a.v_trace, b.v_trace);
  EXPECT_EQ(a.state.q_d, b.state.q_d);
  EXPECT_EQ(a.empirical_worst_rate_bits, b.empirical_worst_rate_bits);
}

TEST(RunRtd, ZeroRadiusCertificateIsNominalRate) {
  rtd::SystemConfig cfg;
  cfg.mu = 0.0;
  const auto sc = rtd::generate_scenario(cfg, 2);
  const auto res = rtd::run_rtd(cfg, sc.channels, quick(6));
  const auto nominal = rtd::sum_rate(res.state.receive_filters(), res.state.q_c, res.state.q_d, sc.channels.estimate,
                                     rtd::Dims::of(cfg), cfg.N0);
  EXPECT_NEAR(res.surrogate_rate_bits, nominal.sum_rate_bits, 1e-5 * nominal.sum_rate_bits);
  EXPECT_NEAR(res.cellular_bits, nominal.cellular_sum_bits, 1e-5 * nominal.sum_rate_bits);
  EXPECT_NEAR(res.d2d_bits, nominal.d2d_sum_bits, 1e-5 * nominal.sum_rate_bits);
  // With exact CSI the realized channel is the estimate.
  EXPECT_NEAR(res.on_truth.sum_rate_bits, nominal.sum_rate_bits, 1e-9 * nominal.sum_rate_bits);
}

TEST(RunRtd, SampledWorstRateNeverBelowCertificate) {
  rtd::SystemConfig cfg;
  cfg.mu = 0.3;
  for (std::uint64_t drop = 0; drop < 3; ++drop) {
    const auto sc = rtd::generate_scenario(cfg, drop);
    auto opts = quick(6);
    opts.empirical_samples = 300;
    opts.eval_stream = drop;
    for (const auto& res : {rtd::run_rtd(cfg, sc.channels, opts), rtd::run_nonrobust(cfg, sc.channels, opts)}) {
      EXPECT_GE(res.empirical_worst_rate_bits, res.surrogate_rate_bits - 1e-6) << "drop " << drop;
      EXPECT_GE(res.on_truth.sum_rate_bits, res.surrogate_rate_bits - 1e-6) << "drop " << drop;
      EXPECT_GE(res.v_final, res.v_lower_bound);
    }
  }
}

TEST(RunRtd, CapLoadAndViolationFlag) {
  rtd::SystemConfig cfg;
  cfg.mu = 0.3;
  const auto sc = rtd::generate_scenario(cfg, 1);
  const auto opts = quick(6);
  const auto robust = rtd::run_rtd(cfg, sc.channels, opts);
  ASSERT_EQ(robust.cap_load.size(), cfg.L);
  EXPECT_LE(robust.cap_load.maxCoeff(), 1.0 + 1e-8);
  EXPECT_FALSE(robust.cap_violated);
  const auto plain = rtd::run_nonrobust(cfg, sc.channels, opts);
  EXPECT_EQ(plain.cap_violated, plain.cap_load.maxCoeff() > 1.0 + 1e-8);
  // The nominal design may load each cap up to its ceiling under the estimates only.
  const auto rho0 = rtd::interference_weights(sc.channels.estimate, rtd::without_uncertainty(sc.channels).radii);
  for (int l = 0; l < cfg.L; ++l) EXPECT_LE(rho0.col(l).dot(plain.state.q_d.cwiseAbs2()), cfg.a * (1.0 + 1e-8));
}

TEST(RunRtd, IterationLimitAndTraceSwitch) {
  rtd::SystemConfig cfg;
  const auto sc = rtd::generate_scenario(cfg, 3);
  auto opts = quick(1);
  auto res = rtd::run_rtd(cfg, sc.channels, opts);
  EXPECT_EQ(res.status, rtd::RtdStatus::MaxIter);
  EXPECT_EQ(res.iters_used, 1);
  EXPECT_EQ(res.v_trace.size(), 1u);
  opts.max_iters = 3;
  opts.trace_enabled = false;
  res = rtd::run_rtd(cfg, sc.channels, opts);
  EXPECT_EQ(res.v_trace.size(), 1u);
  EXPECT_EQ(res.iters_used, 3);
}

TEST(RunRtd, SolverFailureCarriesIterationContext) {
  rtd::SystemConfig cfg;
  const auto sc = rtd::generate_scenario(cfg, 0);
  auto opts = quick(3);
  opts.solver.max_outer = 1;
  const auto res = rtd::run_rtd(cfg, sc.channels, opts);
  EXPECT_EQ(res.status, rtd::RtdStatus::SolverFailure);
  EXPECT_NE(res.message.find("iteration 1"), std::string::npos) << res.message;
  EXPECT_GE(res.solver_retries, 1);
}
