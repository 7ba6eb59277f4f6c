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

#include <cmath>
#include <string>

#include "rankflow/parallel.hpp"
#include "rankflow/sim.hpp"

namespace rankflow {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  if (!(horizon >= 0.0)) throw PreconditionError("horizon must be nonnegative");
  if (replicas < 1) throw PreconditionError("replicas must be >= 1");
  if (record_stride < 1) throw PreconditionError("record_stride must be >= 1");
}

std::size_t SimConfig::step_count() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

double normal_tail(double u) { return 0.5 * std::erfc(u / std::sqrt(2.0)); }

LocalTimeLedger ledger_of(const ReplicaTrajectory& replica) {
  LocalTimeLedger ledger;
  if (replica.frames.empty()) return ledger;
  ledger.first_pair = replica.frames.front().first_gap;
  for (const Frame& f : replica.frames) {
    ledger.times.push_back(f.t);
    ledger.cumulative.push_back(f.local_time);
  }
  return ledger;
}

namespace {

// Re-sorts `order` (indices into x/names) by (position, name); positions
// barely move between steps, so an insertion pass is near-linear.
void insertion_rerank(const std::vector<double>& x, const std::vector<int>& names,
                      std::vector<std::size_t>& order) {
  for (std::size_t i = 1; i < order.size(); ++i) {
    const std::size_t moving = order[i];
    const double mx = x[moving];
    const int mn = names[moving];
    std::size_t j = i;
    while (j > 0) {
      const std::size_t prev = order[j - 1];
      if (x[prev] < mx || (x[prev] == mx && names[prev] < mn)) break;
      order[j] = prev;
      --j;
    }
    order[j] = moving;
  }
}

Frame named_frame(double t, const std::vector<int>& names,
                  const std::vector<double>& x,
                  const std::vector<std::size_t>& order) {
  Frame f;
  f.t = t;
  f.names = names;
  f.x = x;
  f.first_rank = 0;
  f.first_gap = 0;
  f.y.reserve(order.size());
  for (std::size_t i : order) f.y.push_back(x[i]);
  f.z.reserve(order.size() - 1);
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    f.z.push_back(f.y[k + 1] - f.y[k]);
  }
  return f;
}

}  // namespace

TrajectoryBatch simulate_named_finite(const std::vector<double>& rank_drifts,
                                      const std::vector<double>& rank_sigmas,
                                      const Configuration& x0,
                                      const SimConfig& cfg,
                                      const NoiseStream& noise) {
  cfg.validate();
  const std::size_t n = x0.size();
  if (n < 1) throw PreconditionError("empty configuration");
  if (rank_drifts.size() != n || rank_sigmas.size() != n) {
    throw PreconditionError("coefficient lists must match the particle count");
  }
  for (double s : rank_sigmas) {
    if (!(s > 0.0)) throw PreconditionError("diffusion scales must be positive");
  }

  TrajectoryBatch batch;
  batch.config = cfg;
  batch.replicas.resize(cfg.replicas);
  const std::size_t steps = cfg.step_count();
  const double sqrt_dt = std::sqrt(cfg.dt);

  parallel_for(cfg.replicas, [&](std::size_t r) {
    const std::uint32_t replica = static_cast<std::uint32_t>(r);
    std::vector<double> x = x0.positions;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    insertion_rerank(x, x0.names, order);

    ReplicaTrajectory traj;
    traj.replica = replica;
    traj.frames.push_back(named_frame(0.0, x0.names, x, order));

    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        const double xi =
            noise.normal({replica, Series::kNamed, x0.names[i],
                          static_cast<std::uint64_t>(s)});
        x[i] += rank_drifts[k] * cfg.dt + rank_sigmas[k] * sqrt_dt * xi;
        if (!std::isfinite(x[i])) {
          throw NumericalError("position overflow in replica " +
                               std::to_string(replica) + " at step " +
                               std::to_string(s));
        }
      }
      insertion_rerank(x, x0.names, order);
      if ((s + 1) % cfg.record_stride == 0 || s + 1 == steps) {
        traj.frames.push_back(
            named_frame(static_cast<double>(s + 1) * cfg.dt, x0.names, x, order));
      }
    }
    batch.replicas[r] = std::move(traj);
  });
  return batch;
}

}  // namespace rankflow
