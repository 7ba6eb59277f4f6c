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

#ifndef RANKFLOW_RATES_HPP_
#define RANKFLOW_RATES_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rankflow/field.hpp"
#include "rankflow/model.hpp"
#include "rankflow/noise.hpp"

namespace rankflow {

enum class RateProvenance {
  kAbFamily,          // two-parameter stationary family lambda_n = 2*prefix(g, n+1) + a + b*n
  kFiniteProductForm, // finite-system rates mu_n with implicit zero boundaries
  kWindowFormula,     // finite-window approximation rates lambda_k^(M,N)
};

// A materialized window of gap rates (units 1/position), values[i] being the
// rate at index first + i.
struct RateSequence {
  int first = 0;
  std::vector<double> values;
  RateProvenance provenance = RateProvenance::kAbFamily;
  double a = 0.0;  // ab-family parameters, meaningful for kAbFamily
  double b = 0.0;
  int window_lo = 0;  // source window, meaningful for kWindowFormula /
  int window_hi = 0;  // number of particles bounds for kFiniteProductForm

  int last() const { return first + static_cast<int>(values.size()) - 1; }
  double at(int n) const { return values[static_cast<std::size_t>(n - first)]; }
};

// Stability failure of a finite system: the first index where the partial
// drift average does not exceed the overall average. A value, not a fault.
struct StabilityViolation {
  int first_failing_index = 0;
  double rate_value = 0.0;
};

using FiniteRatesResult = std::variant<RateSequence, StabilityViolation>;

// A series of values indexed from `first` (residuals, diagnostics).
struct IndexedSeries {
  int first = 0;
  std::vector<double> values;
};

// Exact parameter region { (a, b) : every rate of the ab family is > 0 }.
// The slope interval is closed; the a-boundary is strictly excluded.
// Membership is evaluated against the exact candidate lines, never against
// interpolated breakpoints.
class SigmaRegion {
 public:
  bool empty() const { return empty_; }
  double b_min() const { return b_min_; }
  double b_max() const { return b_max_; }
  // Envelope vertices (b, a_min(b)) with b ascending across [b_min, b_max].
  const std::vector<std::pair<double, double>>& breakpoints() const {
    return breakpoints_;
  }
  // Largest lower bound for a at this slope; requires b in [b_min, b_max].
  double a_min(double b) const;
  bool contains(double a, double b) const;
  std::string to_json() const;

 private:
  friend SigmaRegion sigma_region(const DriftField& g);
  bool empty_ = true;
  double b_min_ = 0.0;
  double b_max_ = 0.0;
  // Candidate lines a_min = intercept + slope * b.
  std::vector<std::pair<double, double>> lines_;  // (slope, intercept)
  std::vector<std::pair<double, double>> breakpoints_;
};

// Stationary-family rate at index n: 2 * prefix(g, n+1) + a + b*n, evaluated
// with exact tail algebra (affine in n beyond the core).
double lambda_ab(const DriftField& g, double a, double b, std::int64_t n);

// Materialize the ab family over [lo, hi].
RateSequence lambda_ab_sequence(const DriftField& g, double a, double b,
                                int lo, int hi);

// Second-difference residuals r_n = lam_{n-1}/2 - lam_n + lam_{n+1}/2
// - (g_{n+1} - g_n). For kFiniteProductForm input the boundary rates are
// implicitly zero, so residuals cover every index of the sequence; otherwise
// residuals cover interior indices only. Requires three consecutive indices.
IndexedSeries difference_residual(const RateSequence& lam, const DriftField& g);

// Finite-system stationary gap rates mu_n = 2(g_1 + ... + g_n - n*avg),
// n = 1..N-1, for drifts g_1..g_N (unit diffusions). Returns the first
// failing index when some mu_n <= 0.
FiniteRatesResult finite_rates(const std::vector<double>& drifts);

struct WindowRates {
  RateSequence rates;
  bool assumption1_holds = false;
};

// Finite-window rates lambda_k = 2(k - M + 1)(avg g over [M, k] - avg g over
// [M, N]) for k = M..N-1, with the drift-average condition reported as
// assumption1_holds.
WindowRates window_rates(const DriftField& g, const Window& w);

// Single-rate evaluation for arbitrary (possibly huge) windows; O(core) via
// tail algebra.
double window_rate_at(const DriftField& g, std::int64_t m, std::int64_t n,
                      std::int64_t k);

// Exact positivity check of all window rates. The rate is piecewise affine
// in k outside the field core, so checking piece endpoints plus the core
// indices decides every k in [m, n-1]. Returns the first failing index, or
// nullopt-style sentinel (n) when all positive.
std::int64_t first_nonpositive_window_rate(const DriftField& g, std::int64_t m,
                                           std::int64_t n);

// Window growth rules with M_j = 1 - j. kLinear: N_j = n_slope*j + n_offset.
// kQuadratic: N_j = j^2. kAdaptive: the smallest N >= max(N_{j-1}, j^2) with
// all window rates positive, then doubled while positivity holds (up to
// overshoot_doublings) to shrink the finite-window correction.
struct WindowStrategy {
  enum class Kind { kLinear, kQuadratic, kAdaptive };
  Kind kind = Kind::kLinear;
  std::int64_t n_slope = 1;
  std::int64_t n_offset = 0;
  int overshoot_doublings = 12;

  static WindowStrategy linear(std::int64_t slope = 1, std::int64_t offset = 0);
  static WindowStrategy quadratic();
  static WindowStrategy adaptive(int overshoot_doublings = 12);
};

struct LimitOutcome {
  enum class Kind { kFinite, kInfinite, kInconclusive };
  Kind kind = Kind::kInconclusive;
  double value = 0.0;  // last evaluated rate
};

struct LimitVerdict {
  std::vector<int> indices;
  std::vector<LimitOutcome> outcomes;
  std::int64_t j_used = 0;

  bool all_finite() const;
  bool all_infinite() const;
};

struct LimitOptions {
  double tol = 1e-9;
  double divergence_threshold = 1e6;
  std::int64_t j_max = 2'000'000;
};

// Classify the window-rate limits for the tracked indices by growing windows
// along the strategy. Every generated window must satisfy the positivity
// assumption (else AssumptionViolated). Monotone nondecrease of each tracked
// rate across nested windows is asserted.
LimitVerdict lambda_limit(const DriftField& g, const WindowStrategy& strategy,
                          const std::vector<int>& tracked,
                          const LimitOptions& options = {});

// Exact description of the admissible (a, b) set for this field.
SigmaRegion sigma_region(const DriftField& g);

// Independent exponential gap draws with the ab-family rates over the
// window; deterministic in (noise seed, replica).
GapVector sample_pi_ab(const DriftField& g, double a, double b,
                       const Window& w, const NoiseStream& noise,
                       std::uint32_t replica);

}  // namespace rankflow

#endif  // RANKFLOW_RATES_HPP_
