// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RANKFLOW_NOISE_HPP_
#define RANKFLOW_NOISE_HPP_

#include <cstdint>
#include <map>
#include <tuple>

namespace rankflow {

// Independent substream labels. Addresses are (replica, series, index, step):
// one address, one variate. Adding replicas or extending a run never perturbs
// variates already drawn, since there is no shared mutable state.
enum class Series : std::uint8_t {
  kNamed = 1,      // per-name Brownian increments (named and two-sided engines)
  kRank = 2,       // per-rank Brownian increments (gap engine, coupled pairs)
  kInitGap = 3,    // initial spacing draws
  kPiSample = 4,   // stationary-law samplers
  kTailSpawn = 5,  // position draw when a dormant tail particle activates
  kScratch = 6,    // miscellaneous draws in tools and tests
};

struct NoiseAddress {
  std::uint32_t replica = 0;
  Series series = Series::kScratch;
  std::int32_t index = 0;
  std::uint64_t step = 0;
};

// Deterministic source of variates addressed by (replica, series, index,
// step). Implementations must be pure: identical (seed, address) yields an
// identical value, and evaluation is safe from any number of threads.
class NoiseStream {
 public:
  virtual ~NoiseStream() = default;
  // Standard normal increment at the address.
  virtual double normal(const NoiseAddress& a) const = 0;
  // Uniform variate in (0, 1) at the address.
  virtual double uniform(const NoiseAddress& a) const = 0;
};

// Philox 4x32-10 block cipher output. Salmon et al., SC 2011.
// Key = 64-bit seed; counter = packed address.
struct PhiloxBlock {
  std::uint32_t w[4];
};
PhiloxBlock philox4x32(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                       std::uint32_t c2, std::uint32_t c3);

// Counter-based stream: one Philox block per address, Box-Muller for the
// normal branch. Stateless, so copies are cheap and evaluation is pure.
class PhiloxNoise final : public NoiseStream {
 public:
  explicit PhiloxNoise(std::uint64_t seed) : seed_(seed) {}
  double normal(const NoiseAddress& a) const override;
  double uniform(const NoiseAddress& a) const override;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Finite table of scripted increments for exact arithmetic tests. Addresses
// not present in the table return the fallback (default 0 for normals,
// 0.5 for uniforms).
class ScriptedNoise final : public NoiseStream {
 public:
  ScriptedNoise() = default;
  void set_normal(const NoiseAddress& a, double value);
  void set_uniform(const NoiseAddress& a, double value);
  double normal(const NoiseAddress& a) const override;
  double uniform(const NoiseAddress& a) const override;

 private:
  using Key = std::tuple<std::uint32_t, std::uint8_t, std::int32_t, std::uint64_t>;
  static Key key(const NoiseAddress& a);
  std::map<Key, double> normals_;
  std::map<Key, double> uniforms_;
};

}  // namespace rankflow

#endif  // RANKFLOW_NOISE_HPP_
