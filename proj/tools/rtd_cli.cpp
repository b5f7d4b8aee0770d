// Command-line front end: single runs, parameter sweeps, convergence traces and self-checks.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rtd.hpp"

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  int max_iters = 50;
  double rel_tol = 1e-3;
  int samples = 200;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "configuration file (key = value lines)");
  cmd->add_option("-s,--set", c.overrides, "override a configuration key, e.g. --set mu=0.5");
  cmd->add_option("--max-iters", c.max_iters, "outer iteration limit")->check(CLI::PositiveNumber);
  cmd->add_option("--rel-tol", c.rel_tol, "relative change of V that stops the loop")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", c.samples, "channel draws for the sampled worst-case rate")->check(CLI::NonNegativeNumber);
}

rtd::SystemConfig load(const Common& c) {
  rtd::SystemConfig cfg = c.config_path.empty() ? rtd::SystemConfig{} : rtd::load_config(c.config_path);
  std::ostringstream extra;
  for (const auto& kv : c.overrides) {
    if (kv.find('=') == std::string::npos) throw rtd::ConfigError(0, "--set expects key=value, got '" + kv + "'");
    extra << kv << "\n";
  }
  return rtd::parse_config_string(extra.str(), cfg);
}

rtd::RtdOptions options(const Common& c) {
  rtd::RtdOptions o;
  o.max_iters = c.max_iters;
  o.rel_tol = c.rel_tol;
  o.empirical_samples = c.samples;
  return o;
}

std::vector<double> parse_values(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(rtd::harness::parse_double(rtd::detail::trim(item)));
  return out;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  return file;
}

void print_result(const rtd::RtdResult& r) {
  std::cout << std::setprecision(6);
  std::cout << "status            " << rtd::to_string(r.status) << "\n"
            << "iterations        " << r.iters_used << "\n"
            << "V_final           " << r.v_final << "\n"
            << "V_lower_bound     " << r.v_lower_bound << "\n"
            << "surrogate_bits    " << r.surrogate_rate_bits << "\n"
            << "  cellular_bits   " << r.cellular_bits << "\n"
            << "  d2d_bits        " << r.d2d_bits << "\n"
            << "empirical_bits    " << r.empirical_worst_rate_bits << "\n"
            << "true_channel_bits " << r.on_truth.sum_rate_bits << "\n"
            << "cap_load          " << r.cap_load.transpose() << (r.cap_violated ? "  (exceeded)" : "") << "\n";
  if (!r.message.empty()) std::cout << "message           " << r.message << "\n";
  std::cout << "v_trace          ";
  for (double v : r.v_trace) std::cout << " " << v;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust transceiver design for D2D underlay cellular uplinks"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, conv_opts;
  int run_drop = 0;
  std::string run_variant = "rtd";
  auto* run = app.add_subcommand("run", "design one drop and print a summary");
  add_common(run, run_opts);
  run->add_option("--drop", run_drop, "drop index")->check(CLI::NonNegativeNumber);
  run->add_option("--variant", run_variant, "rtd, nonrobust or cellular_only");

  std::string axis = "mu", values = "0,0.3,0.5", variants = "rtd", rows_out, plot_out;
  int drops = -1, workers = 0;
  bool timing = false;
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over one parameter");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "P_dBm, N, B, mu, a_dBm or D_max");
  sweep->add_option("--values", values, "comma-separated axis values");
  sweep->add_option("--drops", drops, "drops per axis value (default: mc_drops of the config)");
  sweep->add_option("--variants", variants, "comma-separated subset of rtd,nonrobust,cellular_only");
  sweep->add_option("--out", rows_out, "row CSV path (default stdout)");
  sweep->add_option("--plot", plot_out, "plot data CSV path");
  sweep->add_option("--workers", workers, "worker threads (default RTD_WORKERS or all cores)");
  sweep->add_flag("--timing", timing, "record wall-clock runtime per row");

  int conv_drops = 1;
  std::string conv_out;
  auto* conv = app.add_subcommand("convergence", "objective trace per iteration");
  add_common(conv, conv_opts);
  conv->add_option("--drops", conv_drops, "number of drops")->check(CLI::PositiveNumber);
  conv->add_option("--out", conv_out, "CSV path (default stdout)");

  auto* validate = app.add_subcommand("validate", "run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      rtd::SystemConfig cfg = load(run_opts);
      const auto variant = rtd::harness::parse_variant(run_variant);
      if (variant == rtd::harness::Variant::CellularOnly) cfg.N = 0;
      const auto sc = rtd::generate_scenario(cfg, static_cast<std::uint64_t>(run_drop));
      auto opts = options(run_opts);
      opts.eval_stream = static_cast<std::uint64_t>(run_drop);
      print_result(variant == rtd::harness::Variant::NonRobust ? rtd::run_nonrobust(cfg, sc.channels, opts)
                                                               : rtd::run_rtd(cfg, sc.channels, opts));
      return 0;
    }
    if (*sweep) {
      rtd::harness::SweepSpec spec;
      spec.base = load(sweep_opts);
      spec.axis = rtd::harness::parse_axis(axis);
      spec.values = parse_values(values);
      spec.drops = drops > 0 ? drops : spec.base.mc_drops;
      spec.variants.clear();
      std::stringstream vs(variants);
      for (std::string v; std::getline(vs, v, ',');) spec.variants.push_back(rtd::harness::parse_variant(v));
      spec.options = options(sweep_opts);
      spec.workers = workers;
      spec.timing = timing;
      const auto rows = rtd::harness::run_sweep(spec);
      std::ofstream file;
      rtd::harness::emit_csv(rows, open_out(rows_out, file));
      const auto aggs = rtd::harness::aggregate(rows);
      if (!plot_out.empty()) rtd::harness::emit_plot_data(aggs, plot_out);
      std::cerr << "variant        x        n  failed  surrogate_bits (stderr)  empirical_bits\n";
      for (const auto& a : aggs)
        std::fprintf(stderr, "%-13s %8g %5d %7d  %10.4f (%.4f)  %10.4f\n", rtd::harness::to_string(a.variant),
                     a.axis_value, a.n_ok, a.n_failed, a.surrogate.mean, a.surrogate.stderr_, a.empirical.mean);
      return 0;
    }
    if (*conv) {
      const rtd::SystemConfig cfg = load(conv_opts);
      auto opts = options(conv_opts);
      opts.empirical_samples = 0;
      std::ofstream file;
      std::ostream& os = open_out(conv_out, file);
      rtd::harness::write_csv_line(os, {"drop", "iteration", "V", "status"});
      for (int d = 0; d < conv_drops; ++d) {
        const auto r = rtd::run_rtd(cfg, rtd::generate_scenario(cfg, static_cast<std::uint64_t>(d)).channels, opts);
        for (std::size_t i = 0; i < r.v_trace.size(); ++i)
          rtd::harness::write_csv_line(os, {std::to_string(d), std::to_string(i + 1),
                                            rtd::harness::format_double(r.v_trace[i]), rtd::to_string(r.status)});
      }
      return 0;
    }
    if (*validate) {
      bool all = true;
      for (const auto& c : rtd::validation::run_all()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        all = all && c.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const rtd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
