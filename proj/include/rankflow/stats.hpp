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

#ifndef RANKFLOW_STATS_HPP_
#define RANKFLOW_STATS_HPP_

#include <string>
#include <vector>

#include "rankflow/rates.hpp"
#include "rankflow/sim.hpp"

namespace rankflow {

// Maximum-likelihood rate of an exponential sample: 1 / mean.
// Requires a nonempty, strictly positive sample.
double exp_rate_mle(const std::vector<double>& sample);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Limiting Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{j-1}
// exp(-2 j^2 lambda^2); the effective-n correction follows the usual
// sqrt(n) + 0.12 + 0.11/sqrt(n) scaling.
double ks_asymptotic_p(double statistic, double n_effective);

// One-sample Kolmogorov-Smirnov distance between the empirical CDF and
// 1 - exp(-rate * x), with the asymptotic p approximation.
KsResult ks_exponential(std::vector<double> sample, double rate);

// One-sided two-sample test of the hypothesis A is stochastically below B:
// rejects when the empirical survival of A exceeds that of B by more than
// the critical band. statistic = sup_x (S_A(x) - S_B(x))+, and under the
// hypothesis p = exp(-2 statistic^2 nm/(n+m)).
struct DominationVerdict {
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.01;
  bool rejected = false;
};

DominationVerdict domination_test(std::vector<double> lower_sample,
                                  std::vector<double> upper_sample,
                                  double alpha);

// Pooled post-burn-in samples of one gap across replicas and recorded
// frames, thinned by `thin` frames.
std::vector<double> pooled_gap_samples(const TrajectoryBatch& batch,
                                       int gap_index, double burn_in,
                                       std::size_t thin = 1);

struct GapStats {
  int index = 0;
  std::size_t n = 0;
  double rate_mle = 0.0;
  double target_rate = 0.0;
  double ks_stat = 0.0;
  double ks_p = 1.0;
  double lag1_autocorr = 0.0;
};

struct GapStatsReport {
  std::vector<GapStats> gaps;
  // correlation[i][j] between central_indices[i] and central_indices[j].
  std::vector<std::vector<double>> correlation;
  double max_abs_adjacent_correlation = 0.0;
  double alpha = 0.01;
  bool all_ks_pass = false;

  std::string to_json() const;
  std::string to_csv() const;
};

// Tests pooled post-burn-in samples of each requested gap against the target
// exponential rates, with pairwise correlations of the central gaps as the
// independence proxy. Requires >= 100 samples per gap.
GapStatsReport stationarity_report(const TrajectoryBatch& batch,
                                   const RateSequence& target, double burn_in,
                                   const std::vector<int>& central_indices,
                                   double alpha = 0.01, std::size_t thin = 1);

struct DecayPoint {
  double t = 0.0;
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 standard errors
  std::size_t n = 0;
};

struct DecayDiagnostic {
  int gap_index = 0;
  std::vector<DecayPoint> points;
  // Standardized decrease from the first to the last requested time;
  // positive values indicate shrinking gaps.
  double trend_z = 0.0;
  bool significant_decrease = false;  // trend_z > 3

  std::string to_json() const;
};

// Mean central-gap trajectory across replicas at the requested times
// (each must be a recorded frame). Requires at least two time points and a
// nonempty batch.
DecayDiagnostic decay_diagnostic(const TrajectoryBatch& batch, int gap_index,
                                 const std::vector<double>& times);

}  // namespace rankflow

#endif  // RANKFLOW_STATS_HPP_
