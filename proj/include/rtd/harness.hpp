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

// Monte Carlo sweeps over one configuration parameter, CSV emission and aggregation.
//
// Every (axis value, variant) pair sees drop i generated from the same master seed and drop
// index, so comparisons across variants and axis values are paired.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rtd/algorithm.hpp"
#include "rtd/config.hpp"
#include "rtd/network.hpp"

namespace rtd::harness {

enum class Variant { Rtd, NonRobust, CellularOnly };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::Rtd: return "rtd";
    case Variant::NonRobust: return "nonrobust";
    case Variant::CellularOnly: return "cellular_only";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  for (Variant v : {Variant::Rtd, Variant::NonRobust, Variant::CellularOnly})
    if (s == to_string(v)) return v;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

enum class Axis { P_dBm, N, B, mu, a_dBm, D_max };

inline const char* to_string(Axis a) {
  switch (a) {
    case Axis::P_dBm: return "P_dBm";
    case Axis::N: return "N";
    case Axis::B: return "B";
    case Axis::mu: return "mu";
    case Axis::a_dBm: return "a_dBm";
    case Axis::D_max: return "D_max";
  }
  return "?";
}

inline Axis parse_axis(const std::string& s) {
  for (Axis a : {Axis::P_dBm, Axis::N, Axis::B, Axis::mu, Axis::a_dBm, Axis::D_max})
    if (s == to_string(a)) return a;
  throw std::invalid_argument("unknown axis '" + s + "'");
}

/// Copy of `base` with the axis parameter set to `value`; throws if the result is invalid.
inline SystemConfig apply_axis(SystemConfig cfg, Axis axis, double value) {
  auto as_int = [&] {
    if (value != std::round(value)) throw std::invalid_argument(std::string(to_string(axis)) + " needs integer values");
    return static_cast<int>(value);
  };
  switch (axis) {
    case Axis::P_dBm: cfg.P_c_max = cfg.P_d_max = dbm_to_watt(value); break;
    case Axis::N: cfg.N = as_int(); break;
    case Axis::B: cfg.B = as_int(); break;
    case Axis::mu: cfg.mu = value; break;
    case Axis::a_dBm: cfg.a = dbm_to_watt(value); break;
    case Axis::D_max: cfg.D_max = value; break;
  }
  cfg.validate();
  return cfg;
}

struct SweepSpec {
  SystemConfig base;
  Axis axis = Axis::mu;
  std::vector<double> values;
  int drops = 100;
  std::vector<Variant> variants{Variant::Rtd};
  RtdOptions options;
  int workers = 0;      // 0: RTD_WORKERS, else the hardware thread count
  bool timing = false;  // wall-clock runtime in the rows (breaks byte-identical output)

  void validate() const {
    if (values.empty()) throw std::invalid_argument("sweep: no axis values");
    if (drops < 1) throw std::invalid_argument("sweep: drops must be >= 1");
    if (variants.empty()) throw std::invalid_argument("sweep: no variants");
    for (double v : values) (void)apply_axis(base, axis, v);
    options.validate();
  }
};

struct ResultRow {
  int run_id = 0;
  std::uint64_t seed = 0;
  int drop = 0;
  Variant variant = Variant::Rtd;
  std::string axis;
  double axis_value = 0.0;
  SystemConfig config;
  int iters = 0;
  RtdStatus status = RtdStatus::MaxIter;
  double v_final = 0.0;
  double surrogate_rate_bits = 0.0;
  double empirical_rate_bits = 0.0;
  double cellular_bits = 0.0;
  double d2d_bits = 0.0;
  bool cap_violated = false;
  double runtime_ms = 0.0;
  std::uint64_t channel_hash = 0;

  bool failed() const { return status == RtdStatus::SolverFailure; }
};

inline int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RTD_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

inline void fill_row(ResultRow& row, const RtdResult& r) {
  row.iters = r.iters_used;
  row.status = r.status;
  row.v_final = r.v_final;
  row.surrogate_rate_bits = r.surrogate_rate_bits;
  row.empirical_rate_bits = r.empirical_worst_rate_bits;
  row.cellular_bits = r.cellular_bits;
  row.d2d_bits = r.d2d_bits;
  row.cap_violated = r.cap_violated;
}

// Runs job(i) for i in [0, n) on a pool of threads.
template <class Job>
void parallel_for(int n, int workers, Job&& job) {
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i = next++; i < n; i = next++) job(i);
  };
  const int t = std::min(worker_count(workers), n);
  if (t <= 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  for (int k = 0; k < t; ++k) pool.emplace_back(loop);
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// All rows of a sweep, sorted by (axis value, drop, variant) with run_id the position.
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  struct Job {
    int value_index;
    int drop;
    Variant variant;
  };
  std::vector<Job> jobs;
  for (int vi = 0; vi < static_cast<int>(spec.values.size()); ++vi)
    for (int d = 0; d < spec.drops; ++d)
      for (Variant v : spec.variants) jobs.push_back({vi, d, v});

  // The nominal design ignores the radii, so along a mu axis it is computed once per drop.
  using NominalKey = std::pair<double, int>;
  auto nominal_key = [&](int value_index, int drop) {
    return NominalKey{spec.axis == Axis::mu ? 0.0 : spec.values[value_index], drop};
  };
  std::map<NominalKey, CoreRun> nominal;
  std::vector<std::pair<int, int>> nominal_jobs;  // (value index, drop)
  for (const auto& j : jobs)
    if (j.variant == Variant::NonRobust && nominal.emplace(nominal_key(j.value_index, j.drop), CoreRun{}).second)
      nominal_jobs.emplace_back(j.value_index, j.drop);
  // Each job writes its own pre-inserted map entry, so no locking is needed.
  detail::parallel_for(static_cast<int>(nominal_jobs.size()), spec.workers, [&](int i) {
    const auto [vi, drop] = nominal_jobs[i];
    const SystemConfig cfg = apply_axis(spec.base, spec.axis, spec.values[vi]);
    nominal.at(nominal_key(vi, drop)) =
        nominal_core(cfg, generate_scenario(cfg, static_cast<std::uint64_t>(drop)).channels, spec.options);
  });

  std::vector<ResultRow> rows(jobs.size());
  detail::parallel_for(static_cast<int>(jobs.size()), spec.workers, [&](int i) {
    const Job& j = jobs[i];
    SystemConfig cfg = apply_axis(spec.base, spec.axis, spec.values[j.value_index]);
    if (j.variant == Variant::CellularOnly) cfg.N = 0;
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = generate_scenario(cfg, static_cast<std::uint64_t>(j.drop));
    RtdOptions opts = spec.options;
    opts.eval_stream = static_cast<std::uint64_t>(j.drop);
    RtdResult r;
    if (j.variant == Variant::NonRobust) {
      r = evaluate_nominal(cfg, sc.channels, nominal.at(nominal_key(j.value_index, j.drop)), opts);
    } else {
      r = run_rtd(cfg, sc.channels, opts);
    }
    ResultRow& row = rows[i];
    row.seed = cfg.seed;
    row.drop = j.drop;
    row.variant = j.variant;
    row.axis = to_string(spec.axis);
    row.axis_value = spec.values[j.value_index];
    row.config = cfg;
    detail::fill_row(row, r);
    row.channel_hash = channel_hash(sc.channels);
    if (spec.timing)
      row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  // Jobs were enumerated in (axis value, drop, variant) order already.
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].run_id = static_cast<int>(i);
  return rows;
}

// ---------------------------------------------------------------------------------------------
// Aggregation

struct Stat {
  int n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(n); 0 for n < 2
};

inline Stat summarize(const std::vector<double>& xs) {
  Stat s;
  s.n = static_cast<int>(xs.size());
  if (s.n == 0) return s;
  for (double x : xs) s.mean += x;
  s.mean /= s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / (s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

struct Aggregate {
  Variant variant = Variant::Rtd;
  double axis_value = 0.0;
  int n_ok = 0;
  int n_failed = 0;
  Stat surrogate, empirical, cellular, d2d, iters;
};

/// Means per (axis value, variant) over the rows that did not fail, in first-appearance order.
inline std::vector<Aggregate> aggregate(const std::vector<ResultRow>& rows) {
  std::vector<Aggregate> out;
  std::vector<std::vector<const ResultRow*>> members;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Aggregate& a) { return a.variant == r.variant && a.axis_value == r.axis_value; });
    if (it == out.end()) {
      out.push_back({r.variant, r.axis_value});
      members.emplace_back();
      it = out.end() - 1;
    }
    members[it - out.begin()].push_back(&r);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::vector<double> s, e, c, d, it;
    for (const ResultRow* r : members[i]) {
      if (r->failed()) {
        ++out[i].n_failed;
        continue;
      }
      s.push_back(r->surrogate_rate_bits);
      e.push_back(r->empirical_rate_bits);
      c.push_back(r->cellular_bits);
      d.push_back(r->d2d_bits);
      it.push_back(r->iters);
    }
    out[i].n_ok = static_cast<int>(s.size());
    out[i].surrogate = summarize(s);
    out[i].empirical = summarize(e);
    out[i].cellular = summarize(c);
    out[i].d2d = summarize(d);
    out[i].iters = summarize(it);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// CSV

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return x;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

inline void write_csv_line(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
  os << "\r\n";
}

/// RFC 4180 reader: quoted fields may hold commas, doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> read_csv(std::istream& is) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  char ch;
  auto end_record = [&] {
    rec.push_back(field);
    records.push_back(rec);
    rec.clear();
    field.clear();
    any = false;
  };
  while (is.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (is.peek() == '"') {
          is.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      rec.push_back(field);
      field.clear();
    } else if (ch == '\r' && is.peek() == '\n') {
      is.get(ch);
      end_record();
    } else if (ch == '\n') {
      end_record();
    } else {
      field += ch;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (any) end_record();
  return records;
}

inline const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> h{
      "run_id", "seed", "drop", "variant", "axis", "axis_value",
      "L", "M", "N", "B", "P_c_max", "P_d_max", "a", "N0", "mu", "D_max",
      "cell_radius", "min_bs_distance", "pathloss_exponent", "shadowing_sigma_dB", "pl_ref_dB", "inter_site_distance",
      "iters", "status", "V_final", "surrogate_rate_bits", "empirical_rate_bits", "cellular_bits", "d2d_bits",
      "cap_violated", "runtime_ms", "channel_hash"};
  return h;
}

inline std::vector<std::string> to_fields(const ResultRow& r) {
  const SystemConfig& c = r.config;
  auto d = format_double;
  return {std::to_string(r.run_id), std::to_string(r.seed), std::to_string(r.drop), to_string(r.variant), r.axis,
          d(r.axis_value), std::to_string(c.L), std::to_string(c.M), std::to_string(c.N), std::to_string(c.B),
          d(c.P_c_max), d(c.P_d_max), d(c.a), d(c.N0), d(c.mu), d(c.D_max), d(c.cell_radius), d(c.min_bs_distance),
          d(c.pathloss_exponent), d(c.shadowing_sigma_dB), d(c.pl_ref_dB), d(c.inter_site_distance),
          std::to_string(r.iters), rtd::to_string(r.status), d(r.v_final), d(r.surrogate_rate_bits),
          d(r.empirical_rate_bits), d(r.cellular_bits), d(r.d2d_bits), r.cap_violated ? "1" : "0", d(r.runtime_ms),
          std::to_string(r.channel_hash)};
}

inline RtdStatus parse_status(const std::string& s) {
  for (RtdStatus st : {RtdStatus::Converged, RtdStatus::MaxIter, RtdStatus::SolverFailure})
    if (s == rtd::to_string(st)) return st;
  throw std::invalid_argument("unknown status '" + s + "'");
}

inline ResultRow from_fields(const std::vector<std::string>& f) {
  if (f.size() != csv_header().size()) throw std::invalid_argument("csv: wrong number of fields");
  ResultRow r;
  std::size_t i = 0;
  auto next = [&] { return f[i++]; };
  auto as_int = [&] { return static_cast<int>(std::stol(next())); };
  auto as_d = [&] { return parse_double(next()); };
  r.run_id = as_int();
  r.seed = parse_u64(next());
  r.config.seed = r.seed;
  r.drop = as_int();
  r.variant = parse_variant(next());
  r.axis = next();
  r.axis_value = as_d();
  SystemConfig& c = r.config;
  c.L = as_int();
  c.M = as_int();
  c.N = as_int();
  c.B = as_int();
  c.P_c_max = as_d();
  c.P_d_max = as_d();
  c.a = as_d();
  c.N0 = as_d();
  c.mu = as_d();
  c.D_max = as_d();
  c.cell_radius = as_d();
  c.min_bs_distance = as_d();
  c.pathloss_exponent = as_d();
  c.shadowing_sigma_dB = as_d();
  c.pl_ref_dB = as_d();
  c.inter_site_distance = as_d();
  r.iters = as_int();
  r.status = parse_status(next());
  r.v_final = as_d();
  r.surrogate_rate_bits = as_d();
  r.empirical_rate_bits = as_d();
  r.cellular_bits = as_d();
  r.d2d_bits = as_d();
  r.cap_violated = next() == "1";
  r.runtime_ms = as_d();
  r.channel_hash = parse_u64(next());
  return r;
}

inline void emit_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  write_csv_line(os, csv_header());
  for (const auto& r : rows) write_csv_line(os, to_fields(r));
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  emit_csv(rows, os);
}

inline std::vector<ResultRow> parse_csv(std::istream& is) {
  const auto records = read_csv(is);
  if (records.empty() || records.front() != csv_header()) throw std::invalid_argument("csv: unexpected header");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) rows.push_back(from_fields(records[i]));
  return rows;
}

/// Long-format plot data: one (x, mean, stderr) triple per variant and metric.
inline void emit_plot_data(const std::vector<Aggregate>& aggs, std::ostream& os) {
  write_csv_line(os, {"variant", "metric", "x", "mean", "stderr", "n_ok", "n_failed"});
  const std::pair<const char*, Stat Aggregate::*> metrics[] = {{"surrogate_rate_bits", &Aggregate::surrogate},
                                                               {"empirical_rate_bits", &Aggregate::empirical},
                                                               {"cellular_bits", &Aggregate::cellular},
                                                               {"d2d_bits", &Aggregate::d2d},
                                                               {"iters", &Aggregate::iters}};
  for (const auto& [name, field] : metrics)
    for (const auto& a : aggs) {
      const Stat& s = a.*field;
      write_csv_line(os, {to_string(a.variant), name, format_double(a.axis_value), format_double(s.mean),
                          format_double(s.stderr_), std::to_string(a.n_ok), std::to_string(a.n_failed)});
    }
}

inline void emit_plot_data(const std::vector<Aggregate>& aggs, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  emit_plot_data(aggs, os);
}

}  // namespace rtd::harness
