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

// Counter-based seeding: every random entity (a user position, a link's fading,
// a link's CSI error) gets its own engine keyed by (master seed, drop, tag, ids).
// Adding users or antennas therefore never shifts the draws of existing links.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rtd {

enum class StreamTag : std::uint64_t {
  CuPosition = 1,
  D2dTxPosition,
  D2dRxPosition,
  Shadowing,
  SmallScale,
  CsiError,
  Evaluation,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class StreamFactory {
 public:
  StreamFactory(std::uint64_t master_seed, std::uint64_t drop) : seed_(master_seed), drop_(drop) {}

  std::mt19937_64 stream(StreamTag tag, std::initializer_list<std::uint64_t> ids = {}) const {
    std::uint64_t h = splitmix64(seed_);
    h = splitmix64(h ^ drop_);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    for (std::uint64_t id : ids) h = splitmix64(h ^ (id + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t drop() const { return drop_; }

 private:
  std::uint64_t seed_;
  std::uint64_t drop_;
};

}  // namespace rtd
