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

#include "rankflow/noise.hpp"

#include <cmath>

namespace rankflow {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t* lo,
                      std::uint32_t* hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *lo = static_cast<std::uint32_t>(p);
  *hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM4x32A, ctr[0], &lo0, &hi0);
  mul_hi_lo(kPhiloxM4x32B, ctr[2], &lo1, &hi1);
  const std::uint32_t out0 = hi1 ^ ctr[1] ^ key[0];
  const std::uint32_t out2 = hi0 ^ ctr[3] ^ key[1];
  ctr[0] = out0;
  ctr[1] = lo1;
  ctr[2] = out2;
  ctr[3] = lo0;
}

// Packed counter layout: c0 = replica, c1 = series byte | biased index,
// c2/c3 = step. The index bias keeps signed particle/gap labels in
// [-2^23, 2^23) addressable.
inline void pack_address(const NoiseAddress& a, std::uint32_t ctr[4]) {
  ctr[0] = a.replica;
  const std::uint32_t biased =
      static_cast<std::uint32_t>(a.index + (1 << 23)) & 0x00FFFFFFu;
  ctr[1] = (static_cast<std::uint32_t>(a.series) << 24) | biased;
  ctr[2] = static_cast<std::uint32_t>(a.step);
  ctr[3] = static_cast<std::uint32_t>(a.step >> 32);
}

inline double u64_to_unit(std::uint64_t bits) {
  // 53-bit mantissa, shifted into (0, 1): never exactly 0 or 1.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxBlock philox4x32(std::uint64_t key64, std::uint32_t c0, std::uint32_t c1,
                       std::uint32_t c2, std::uint32_t c3) {
  std::uint32_t ctr[4] = {c0, c1, c2, c3};
  std::uint32_t key[2] = {static_cast<std::uint32_t>(key64),
                          static_cast<std::uint32_t>(key64 >> 32)};
  for (int r = 0; r < 10; ++r) {
    philox_round(ctr, key);
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
  }
  return PhiloxBlock{{ctr[0], ctr[1], ctr[2], ctr[3]}};
}

double PhiloxNoise::uniform(const NoiseAddress& a) const {
  std::uint32_t ctr[4];
  pack_address(a, ctr);
  const PhiloxBlock b = philox4x32(seed_, ctr[0], ctr[1], ctr[2], ctr[3]);
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(b.w[0]) << 32) | b.w[1];
  return u64_to_unit(bits);
}

double PhiloxNoise::normal(const NoiseAddress& a) const {
  std::uint32_t ctr[4];
  pack_address(a, ctr);
  const PhiloxBlock b = philox4x32(seed_, ctr[0], ctr[1], ctr[2], ctr[3]);
  const std::uint64_t bits0 =
      (static_cast<std::uint64_t>(b.w[0]) << 32) | b.w[1];
  const std::uint64_t bits1 =
      (static_cast<std::uint64_t>(b.w[2]) << 32) | b.w[3];
  const double u1 = u64_to_unit(bits0);
  const double u2 = u64_to_unit(bits1);
  // Box-Muller, cosine branch only, so one address maps to one variate.
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

ScriptedNoise::Key ScriptedNoise::key(const NoiseAddress& a) {
  return Key(a.replica, static_cast<std::uint8_t>(a.series), a.index, a.step);
}

void ScriptedNoise::set_normal(const NoiseAddress& a, double value) {
  normals_[key(a)] = value;
}

void ScriptedNoise::set_uniform(const NoiseAddress& a, double value) {
  uniforms_[key(a)] = value;
}

double ScriptedNoise::normal(const NoiseAddress& a) const {
  const auto it = normals_.find(key(a));
  return it == normals_.end() ? 0.0 : it->second;
}

double ScriptedNoise::uniform(const NoiseAddress& a) const {
  const auto it = uniforms_.find(key(a));
  return it == uniforms_.end() ? 0.5 : it->second;
}

}  // namespace rankflow
