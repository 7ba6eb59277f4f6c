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

#ifndef RANKFLOW_SIM_HPP_
#define RANKFLOW_SIM_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "rankflow/field.hpp"
#include "rankflow/model.hpp"
#include "rankflow/noise.hpp"
#include "rankflow/rates.hpp"

namespace rankflow {

struct SimConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  std::uint32_t replicas = 1;
  std::uint64_t seed = 0;
  std::size_t record_stride = 1;

  void validate() const;
  std::size_t step_count() const;
};

// One recorded state. Named series (names, x) may be absent for engines that
// track gaps only, and may grow over time in the adaptive engine. Ranked
// positions y start at rank first_rank; gap k sits above rank first_gap + k.
struct Frame {
  double t = 0.0;
  std::vector<int> names;
  std::vector<double> x;
  int first_rank = 0;
  std::vector<double> y;
  int first_gap = 0;
  std::vector<double> z;
  std::vector<double> local_time;  // cumulative, parallel to z (gap engine)
};

struct ReplicaTrajectory {
  std::uint32_t replica = 0;
  std::vector<Frame> frames;
};

struct TrajectoryBatch {
  SimConfig config;
  std::vector<ReplicaTrajectory> replicas;
  // Worst per-step feasibility/complementarity residual of the reflection
  // solves (gap engine only).
  double max_complementarity_residual = 0.0;
};

// Cumulative reflection pushes L_(k, k+1) per recorded frame.
struct LocalTimeLedger {
  int first_pair = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> cumulative;  // [frame][pair]
};

LocalTimeLedger ledger_of(const ReplicaTrajectory& replica);

struct AbsorptionEvent {
  std::uint32_t replica = 0;
  double time = 0.0;
  int name = 0;
  enum class Side { kLower, kUpper } side = Side::kUpper;
  Window core_after;
};

// Tail of the standard normal distribution, P(Z > u).
double normal_tail(double u);

// Euler scheme for a finite named system: at every step particles are ranked
// bottom to top (ties by ascending name) and each position advances with the
// coefficients of its current rank. Coefficient slot k applies to local rank
// k; noise is addressed per particle name.
TrajectoryBatch simulate_named_finite(const std::vector<double>& rank_drifts,
                                      const std::vector<double>& rank_sigmas,
                                      const Configuration& x0,
                                      const SimConfig& cfg,
                                      const NoiseStream& noise);

// Reflected gap-process integrator. Per step the proposal moves each gap by
// its drift g_{k+1} - g_k and the difference of the adjacent per-rank
// Brownian increments; the discrete reflection problem
//   z' = z* + dl - (shift_left(dl) + shift_right(dl)) / 2,  z' >= 0,
//   dl >= 0,  z'_k dl_k = 0
// is solved per step and dl accumulates into the local-time ledger.
// rank_drifts/rank_sigmas have one entry per rank (gap count + 1); per-rank
// noise is addressed by global rank index, so runs over the same window share
// increments.
TrajectoryBatch simulate_gap_srbm(const std::vector<double>& rank_drifts,
                                  const std::vector<double>& rank_sigmas,
                                  const GapVector& z0, const SimConfig& cfg,
                                  const NoiseStream& noise);

// Two gap trajectories driven by identical per-rank increments, for pathwise
// comparison of ordered starts.
std::pair<TrajectoryBatch, TrajectoryBatch> simulate_coupled_pair(
    const std::vector<double>& drifts_a, const std::vector<double>& drifts_b,
    const std::vector<double>& sigmas_a, const std::vector<double>& sigmas_b,
    const GapVector& z0a, const GapVector& z0b, const SimConfig& cfg,
    const NoiseStream& noise);

// Initial conditions for the two-sided engine. Spacings come from a law
// whose tails grow fast enough for the construction to be admissible:
// either independent Exp(c1 + c2|n|) draws, or the stationary family
// Exp(lambda_n(a, b)) when (a, b) is admissible. Explicit gap values, when
// given, override the law on their index range (test hook).
struct TwoSidedInit {
  Window window{-1, 1};  // initial core ranks
  double anchor = 0.0;   // initial position of rank 0
  enum class Law { kNice, kPiAb } law = Law::kNice;
  double c1 = 1.0;  // Exp(c1 + c2|n|) spacing rates (kNice)
  double c2 = 0.5;
  double a = 1.0;  // stationary-family parameters (kPiAb)
  double b = 0.0;
  IndexedSeries explicit_gaps;  // optional override, empty = none
};

struct TwoSidedOptions {
  double activation_eps = 1e-8;
  std::size_t max_absorptions = 4096;
  std::size_t max_instantiations = 100000;
};

struct TwoSidedResult {
  TrajectoryBatch batch;
  std::vector<AbsorptionEvent> events;  // ordered by (replica, time)
};

// Adaptive construction of the two-sided system: the core window evolves as
// a finite competing system; particles beyond it evolve as free Brownian
// motions with the tail coefficients and are only instantiated once their
// chance of reaching the current core hull within the remaining horizon
// (normal-tail bound) exceeds activation_eps. A tail particle crossing the
// adjacent extreme ranked particle at a step boundary is absorbed into the
// core, which grows by one rank on that side.
TwoSidedResult simulate_two_sided_adaptive(const DriftField& g,
                                           const DiffusionField& s,
                                           const TwoSidedInit& init,
                                           const SimConfig& cfg,
                                           const NoiseStream& noise,
                                           const TwoSidedOptions& options = {});

}  // namespace rankflow

#endif  // RANKFLOW_SIM_HPP_
