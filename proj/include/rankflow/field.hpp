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

#ifndef RANKFLOW_FIELD_HPP_
#define RANKFLOW_FIELD_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "rankflow/errors.hpp"

namespace rankflow {

// Integer index window [lo, hi] of ranks, lo < hi.
struct Window {
  int lo = 0;
  int hi = 1;

  Window() = default;
  Window(int lo_, int hi_) : lo(lo_), hi(hi_) {
    if (lo >= hi) {
      throw PreconditionError("window requires lo < hi, got [" +
                              std::to_string(lo) + ", " + std::to_string(hi) +
                              "]");
    }
  }
  int size() const { return hi - lo + 1; }
  bool contains(int n) const { return lo <= n && n <= hi; }
  bool operator==(const Window&) const = default;
};

// A two-sided coefficient family: explicit values on a finite core
// [core_lo, core_hi] and constant values on both tails.
//
// Evaluation is exact for every integer index; sums over arbitrary index
// ranges reduce to core prefix sums plus tail counts, so quantities like
// window averages stay exact no matter how wide the window is.
class TwoSidedField {
 public:
  TwoSidedField(int core_lo, std::vector<double> core, double tail_minus,
                double tail_plus);

  int core_lo() const { return core_lo_; }
  int core_hi() const { return core_lo_ + static_cast<int>(core_.size()) - 1; }
  double tail_minus() const { return tail_minus_; }
  double tail_plus() const { return tail_plus_; }
  const std::vector<double>& core() const { return core_; }

  double at(std::int64_t n) const {
    if (n < core_lo_) return tail_minus_;
    if (n > core_hi()) return tail_plus_;
    return core_[static_cast<std::size_t>(n - core_lo_)];
  }

  // Sum of values over the integer range [a, b]; zero when a > b.
  // Exact tail algebra: tails contribute count * constant.
  double sum(std::int64_t a, std::int64_t b) const;

  // max |value| over all integers = max over core and the two tails.
  double sup_abs() const;
  // max value over all integers.
  double sup() const;
  // min value over all integers.
  double inf() const;

 protected:
  int core_lo_;
  std::vector<double> core_;
  double tail_minus_;
  double tail_plus_;
};

// Rank-indexed drift coefficients with constant tails.
class DriftField : public TwoSidedField {
 public:
  using TwoSidedField::TwoSidedField;

  // Position-from-gaps style prefix map applied to the drift sequence:
  //   value(0) = 0,  value(m+1) - value(m) = at(m)  for every integer m,
  // so value(m) = g_0 + ... + g_{m-1} for m >= 1 and
  //    value(m) = -(g_m + ... + g_{-1}) for m <= -1.
  double prefix(std::int64_t m) const {
    if (m == 0) return 0.0;
    if (m >= 1) return sum(0, m - 1);
    return -sum(m, -1);
  }

  std::string to_json() const;
  static DriftField from_json(const std::string& text);
};

// Rank-indexed diffusion scales sigma_n (the SDE uses sigma_n^2); all values
// strictly positive.
class DiffusionField : public TwoSidedField {
 public:
  DiffusionField(int core_lo, std::vector<double> core, double tail_minus,
                 double tail_plus);

  std::string to_json() const;
  static DiffusionField from_json(const std::string& text);
};

// Convenience constructors for fields that are constant everywhere.
DriftField constant_drift(double g);
DiffusionField constant_diffusion(double s);

}  // namespace rankflow

#endif  // RANKFLOW_FIELD_HPP_
