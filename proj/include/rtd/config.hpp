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

// Scenario parameters and the flat key = value configuration format.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rtd {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

struct SystemConfig {
  int L = 2;  // cells
  int M = 2;  // cellular users per cell
  int N = 3;  // D2D pairs per cell
  int B = 4;  // BS antennas
  double P_c_max = 0.1;  // W
  double P_d_max = 0.1;  // W
  double a = 1e-11;      // per-BS D2D interference cap, W
  double N0 = 1e-13;     // W
  double mu = 0.3;
  double D_max = 100.0;
  double cell_radius = 250.0;
  double min_bs_distance = 20.0;
  double pathloss_exponent = 3.7;
  double shadowing_sigma_dB = 8.0;
  double pl_ref_dB = 30.0;
  double inter_site_distance = 500.0;
  std::uint64_t seed = 1;
  int mc_drops = 100;

  int cu_count() const { return L * M; }
  int d2d_count() const { return L * N; }

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SystemConfig: " + what); };
    if (L < 1) fail("L must be >= 1");
    if (M < 1) fail("M must be >= 1");
    if (N < 0) fail("N must be >= 0");
    if (B < M) fail("B must be >= M");
    if (!(mu >= 0.0 && mu < 1.0)) fail("mu must lie in [0, 1)");
    if (!(P_c_max > 0.0) || !(P_d_max > 0.0)) fail("powers must be positive");
    if (!(N0 > 0.0)) fail("N0 must be positive");
    if (!(a > 0.0)) fail("a must be positive");
    if (!(cell_radius > 0.0) || !(inter_site_distance > 0.0)) fail("distances must be positive");
    if (!(min_bs_distance >= 0.0) || !(D_max >= 0.0)) fail("distances must be nonnegative");
    if (!(shadowing_sigma_dB >= 0.0)) fail("shadowing_sigma_dB must be nonnegative");
    if (mc_drops < 1) fail("mc_drops must be >= 1");
  }
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& v, int line) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(line, "not a number: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(line, "trailing characters in '" + v + "'");
  return d;
}

inline long long to_integer(const std::string& v, int line) {
  std::size_t pos = 0;
  long long d = 0;
  try {
    d = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw ConfigError(line, "not an integer: '" + v + "'");
  }
  if (pos != v.size()) throw ConfigError(line, "trailing characters in '" + v + "'");
  return d;
}

}  // namespace detail

/// Applies one key/value pair. Keys ending in _dBm are converted to watts.
inline void set_config_value(SystemConfig& c, const std::string& key, const std::string& value, int line = 0) {
  using detail::to_double;
  using detail::to_integer;
  const auto as_int = [&] { return static_cast<int>(to_integer(value, line)); };
  if (key == "L") c.L = as_int();
  else if (key == "M") c.M = as_int();
  else if (key == "N") c.N = as_int();
  else if (key == "B") c.B = as_int();
  else if (key == "P_c_max") c.P_c_max = to_double(value, line);
  else if (key == "P_d_max") c.P_d_max = to_double(value, line);
  else if (key == "P_c_max_dBm") c.P_c_max = dbm_to_watt(to_double(value, line));
  else if (key == "P_d_max_dBm") c.P_d_max = dbm_to_watt(to_double(value, line));
  else if (key == "P_dBm") c.P_c_max = c.P_d_max = dbm_to_watt(to_double(value, line));
  else if (key == "a") c.a = to_double(value, line);
  else if (key == "a_dBm") c.a = dbm_to_watt(to_double(value, line));
  else if (key == "N0") c.N0 = to_double(value, line);
  else if (key == "N0_dBm") c.N0 = dbm_to_watt(to_double(value, line));
  else if (key == "mu") c.mu = to_double(value, line);
  else if (key == "D_max") c.D_max = to_double(value, line);
  else if (key == "cell_radius") c.cell_radius = to_double(value, line);
  else if (key == "min_bs_distance") c.min_bs_distance = to_double(value, line);
  else if (key == "pathloss_exponent") c.pathloss_exponent = to_double(value, line);
  else if (key == "shadowing_sigma_dB") c.shadowing_sigma_dB = to_double(value, line);
  else if (key == "pl_ref_dB") c.pl_ref_dB = to_double(value, line);
  else if (key == "inter_site_distance") c.inter_site_distance = to_double(value, line);
  else if (key == "seed") {
    const long long s = to_integer(value, line);
    if (s < 0) throw ConfigError(line, "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "mc_drops") c.mc_drops = as_int();
  else throw ConfigError(line, "unknown key '" + key + "'");
}

/// Parses "key = value" lines; '#' starts a comment. Unset keys keep the values of `base`.
inline SystemConfig parse_config(std::istream& in, SystemConfig base = {}) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(line, "empty key or value");
    set_config_value(base, key, value, line);
  }
  try {
    base.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, e.what());
  }
  return base;
}

inline SystemConfig parse_config_string(const std::string& text, SystemConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

inline SystemConfig load_config(const std::string& path, SystemConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open '" + path + "'");
  return parse_config(in, base);
}

}  // namespace rtd
