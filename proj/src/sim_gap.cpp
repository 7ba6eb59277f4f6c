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

#include <algorithm>
#include <cmath>

#include "rankflow/parallel.hpp"
#include "rankflow/sim.hpp"

namespace rankflow {

namespace {

constexpr double kSolveTol = 1e-12;
// Typical steps need a handful of sweeps; the bound only matters when a long
// contiguous block of gaps reflects at once.
constexpr int kMaxSweeps = 20000;

// Minimal nonnegative pushes dl with
//   z' = z* + dl - (dl_{k-1} + dl_{k+1}) / 2 >= 0  and  z'_k dl_k = 0.
// The reflection matrix has unit diagonal and -1/2 couplings to the two
// neighbours, so a projected Gauss-Seidel sweep converges. Single-gap systems
// reduce to one projection and solve exactly.
// Returns the worst feasibility/complementarity residual.
double solve_reflection(const std::vector<double>& proposal,
                        std::vector<double>& dl, std::vector<double>& out,
                        std::size_t step) {
  const std::size_t k_gaps = proposal.size();
  std::fill(dl.begin(), dl.end(), 0.0);
  if (k_gaps == 1) {
    dl[0] = std::max(0.0, -proposal[0]);
    out[0] = std::max(proposal[0], 0.0);
    return 0.0;
  }
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t k = 0; k < k_gaps; ++k) {
      const double left = k > 0 ? dl[k - 1] : 0.0;
      const double right = k + 1 < k_gaps ? dl[k + 1] : 0.0;
      const double updated = std::max(0.0, -(proposal[k] - 0.5 * (left + right)));
      change = std::max(change, std::abs(updated - dl[k]));
      dl[k] = updated;
    }
    if (change < kSolveTol) break;
  }
  double residual = 0.0;
  for (std::size_t k = 0; k < k_gaps; ++k) {
    const double left = k > 0 ? dl[k - 1] : 0.0;
    const double right = k + 1 < k_gaps ? dl[k + 1] : 0.0;
    const double z = proposal[k] + dl[k] - 0.5 * (left + right);
    residual = std::max(residual, -z);
    residual = std::max(residual, std::min(std::max(z, 0.0), dl[k]));
    out[k] = std::max(z, 0.0);
  }
  if (sweep >= kMaxSweeps && residual > kSolveTol) {
    throw SkorokhodNonconvergence(step, residual);
  }
  return residual;
}

}  // namespace

TrajectoryBatch simulate_gap_srbm(const std::vector<double>& rank_drifts,
                                  const std::vector<double>& rank_sigmas,
                                  const GapVector& z0, const SimConfig& cfg,
                                  const NoiseStream& noise) {
  cfg.validate();
  const std::size_t k_gaps = z0.values.size();
  if (k_gaps < 1) throw PreconditionError("gap engine needs at least one gap");
  if (rank_drifts.size() != k_gaps + 1 || rank_sigmas.size() != k_gaps + 1) {
    throw PreconditionError("coefficient lists must have one entry per rank");
  }
  for (double s : rank_sigmas) {
    if (!(s > 0.0)) throw PreconditionError("diffusion scales must be positive");
  }

  TrajectoryBatch batch;
  batch.config = cfg;
  batch.replicas.resize(cfg.replicas);
  const std::size_t steps = cfg.step_count();
  const double sqrt_dt = std::sqrt(cfg.dt);
  const int rank_lo = z0.window.lo;

  std::vector<double> gap_drift(k_gaps);
  for (std::size_t k = 0; k < k_gaps; ++k) {
    gap_drift[k] = rank_drifts[k + 1] - rank_drifts[k];
  }

  std::vector<double> residuals(cfg.replicas, 0.0);

  parallel_for(cfg.replicas, [&](std::size_t r) {
    const std::uint32_t replica = static_cast<std::uint32_t>(r);
    std::vector<double> z = z0.values;
    std::vector<double> ledger(k_gaps, 0.0);
    std::vector<double> increments(k_gaps + 1);
    std::vector<double> proposal(k_gaps);
    std::vector<double> dl(k_gaps);
    double worst = 0.0;

    ReplicaTrajectory traj;
    traj.replica = replica;
    const auto record = [&](double t) {
      Frame f;
      f.t = t;
      f.first_rank = rank_lo;
      f.first_gap = rank_lo;
      f.z = z;
      f.local_time = ledger;
      traj.frames.push_back(std::move(f));
    };
    record(0.0);

    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t i = 0; i <= k_gaps; ++i) {
        increments[i] =
            noise.normal({replica, Series::kRank, rank_lo + static_cast<int>(i),
                          static_cast<std::uint64_t>(s)});
      }
      for (std::size_t k = 0; k < k_gaps; ++k) {
        proposal[k] = z[k] + gap_drift[k] * cfg.dt +
                      sqrt_dt * (rank_sigmas[k + 1] * increments[k + 1] -
                                 rank_sigmas[k] * increments[k]);
      }
      worst = std::max(worst, solve_reflection(proposal, dl, z, s));
      for (std::size_t k = 0; k < k_gaps; ++k) ledger[k] += dl[k];
      if ((s + 1) % cfg.record_stride == 0 || s + 1 == steps) {
        record(static_cast<double>(s + 1) * cfg.dt);
      }
    }
    residuals[r] = worst;
    batch.replicas[r] = std::move(traj);
  });

  for (double res : residuals) {
    batch.max_complementarity_residual =
        std::max(batch.max_complementarity_residual, res);
  }
  return batch;
}

std::pair<TrajectoryBatch, TrajectoryBatch> simulate_coupled_pair(
    const std::vector<double>& drifts_a, const std::vector<double>& drifts_b,
    const std::vector<double>& sigmas_a, const std::vector<double>& sigmas_b,
    const GapVector& z0a, const GapVector& z0b, const SimConfig& cfg,
    const NoiseStream& noise) {
  if (z0a.window != z0b.window) {
    throw PreconditionError("coupled pair requires identical gap windows");
  }
  // Identical addresses (same window, same replica ids, same steps) mean the
  // two runs consume the same per-rank increments.
  TrajectoryBatch a = simulate_gap_srbm(drifts_a, sigmas_a, z0a, cfg, noise);
  TrajectoryBatch b = simulate_gap_srbm(drifts_b, sigmas_b, z0b, cfg, noise);
  return {std::move(a), std::move(b)};
}

}  // namespace rankflow
