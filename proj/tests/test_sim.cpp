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

#include "doctest.h"
#include "rankflow/presets.hpp"
#include "rankflow/sim.hpp"
#include "rankflow/stats.hpp"

using namespace rankflow;

namespace {

bool frames_equal(const Frame& a, const Frame& b) {
  return a.t == b.t && a.names == b.names && a.x == b.x && a.y == b.y &&
         a.z == b.z && a.local_time == b.local_time &&
         a.first_rank == b.first_rank && a.first_gap == b.first_gap;
}

bool batches_equal(const TrajectoryBatch& a, const TrajectoryBatch& b) {
  if (a.replicas.size() != b.replicas.size()) return false;
  for (std::size_t r = 0; r < a.replicas.size(); ++r) {
    if (a.replicas[r].frames.size() != b.replicas[r].frames.size()) return false;
    for (std::size_t f = 0; f < a.replicas[r].frames.size(); ++f) {
      if (!frames_equal(a.replicas[r].frames[f], b.replicas[r].frames[f])) {
        return false;
      }
    }
  }
  return true;
}

void check_frame_consistency(const TrajectoryBatch& batch) {
  for (const ReplicaTrajectory& traj : batch.replicas) {
    for (const Frame& f : traj.frames) {
      if (!f.names.empty()) {
        std::vector<double> sorted = f.x;
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(sorted.size() == f.y.size());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
          CHECK(sorted[i] == f.y[i]);
        }
      }
      if (!f.y.empty()) {
        REQUIRE(f.z.size() + 1 == f.y.size());
        for (std::size_t i = 0; i < f.z.size(); ++i) {
          CHECK(f.z[i] == f.y[i + 1] - f.y[i]);
          CHECK(f.z[i] >= 0.0);
        }
      }
    }
  }
}

}  // namespace

TEST_CASE("normal tail values") {
  CHECK(normal_tail(0.0) == 0.5);
  CHECK(normal_tail(1.7) + normal_tail(-1.7) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(normal_tail(1.959964) == doctest::Approx(0.025).epsilon(1e-5));
}

TEST_CASE("zero-horizon run returns the initial configuration") {
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.horizon = 0.0;
  const PhiloxNoise noise(1);
  const Configuration x0({0, 1}, {0.0, 5.0});
  const TrajectoryBatch batch =
      simulate_named_finite({1.0, 0.0}, {1.0, 1.0}, x0, cfg, noise);
  REQUIRE(batch.replicas.size() == 1);
  REQUIRE(batch.replicas[0].frames.size() == 1);
  CHECK(batch.replicas[0].frames[0].x == x0.positions);
}

TEST_CASE("drift-only step applies coefficients by rank") {
  SimConfig cfg;
  cfg.dt = 0.5;
  cfg.horizon = 0.5;
  const ScriptedNoise noise;  // all increments zero
  const Configuration x0({0, 1}, {0.0, 5.0});
  const TrajectoryBatch batch =
      simulate_named_finite({1.0, 0.0}, {1.0, 1.0}, x0, cfg, noise);
  const Frame& last = batch.replicas[0].frames.back();
  CHECK(last.x == std::vector<double>{0.5, 5.0});
}

TEST_CASE("two-particle gap settles into the unit-rate exponential") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 200.0;
  cfg.replicas = 64;
  cfg.record_stride = 2000;  // 2.0 time units between samples
  const PhiloxNoise noise(12345);
  const Configuration x0({0, 1}, {0.0, 1.0});
  const TrajectoryBatch batch =
      simulate_named_finite({1.0, 0.0}, {1.0, 1.0}, x0, cfg, noise);
  const std::vector<double> gaps = pooled_gap_samples(batch, 0, 100.0);
  double mean = 0.0;
  for (double v : gaps) mean += v;
  mean /= static_cast<double>(gaps.size());
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("named engine is deterministic and frame consistent") {
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 2.0;
  cfg.replicas = 3;
  cfg.record_stride = 7;
  const PhiloxNoise noise(77);
  const Configuration x0({-1, 0, 1}, {-1.0, 0.0, 1.0});
  const std::vector<double> g{1.0, 0.0, -1.0};
  const std::vector<double> s{1.0, 0.5, 1.0};
  const TrajectoryBatch a = simulate_named_finite(g, s, x0, cfg, noise);
  const TrajectoryBatch b = simulate_named_finite(g, s, x0, cfg, noise);
  CHECK(batches_equal(a, b));
  check_frame_consistency(a);
}

TEST_CASE("gap engine: inactive reflection is plain Euler") {
  SimConfig cfg;
  cfg.dt = 0.25;
  cfg.horizon = 0.25;
  const ScriptedNoise noise;
  const GapVector z0(Window(0, 2), {4.0, 6.0});
  // Rank drifts (0, 1, 3) push both gaps up by (1, 2) * dt.
  const TrajectoryBatch batch =
      simulate_gap_srbm({0.0, 1.0, 3.0}, {1.0, 1.0, 1.0}, z0, cfg, noise);
  const Frame& last = batch.replicas[0].frames.back();
  CHECK(last.z == std::vector<double>{4.25, 6.5});
  CHECK(last.local_time == std::vector<double>{0.0, 0.0});
  CHECK(batch.max_complementarity_residual <= 1e-12);
}

TEST_CASE("gap engine: a single negative proposal is projected back") {
  SimConfig cfg;
  cfg.dt = 0.1;
  cfg.horizon = 0.1;
  const ScriptedNoise noise;
  const GapVector z0(Window(0, 3), {5.0, 0.05, 5.0});
  // Gap drifts are (1, -2, 1): the middle proposal lands at -0.15.
  const std::vector<double> drifts{0.0, 1.0, -1.0, 0.0};
  const TrajectoryBatch batch =
      simulate_gap_srbm(drifts, {1.0, 1.0, 1.0, 1.0}, z0, cfg, noise);
  const Frame& last = batch.replicas[0].frames.back();
  CHECK(last.local_time[1] == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(last.z[1] == doctest::Approx(0.0).epsilon(1e-12));
  // Neighbours lose half of the push on top of their own drift.
  CHECK(last.z[0] == doctest::Approx(5.0 + 0.1 - 0.075).epsilon(1e-12));
  CHECK(last.z[2] == doctest::Approx(5.0 + 0.1 - 0.075).epsilon(1e-12));
  CHECK(last.local_time[0] == 0.0);
  CHECK(last.local_time[2] == 0.0);
}

TEST_CASE("gap engine local time accrues at the stationary rate") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 300.0;
  cfg.record_stride = 1000;
  const PhiloxNoise noise(5150);
  const GapVector z0(Window(0, 1), {1.0});
  const TrajectoryBatch batch =
      simulate_gap_srbm({1.0, 0.0}, {1.0, 1.0}, z0, cfg, noise);
  const LocalTimeLedger ledger = ledger_of(batch.replicas[0]);
  for (std::size_t f = 1; f < ledger.cumulative.size(); ++f) {
    CHECK(ledger.cumulative[f][0] >= ledger.cumulative[f - 1][0]);
  }
  const double rate = ledger.cumulative.back()[0] / cfg.horizon;
  CHECK(rate == doctest::Approx(1.0).epsilon(0.15));
  CHECK(batch.max_complementarity_residual <= 1e-12);
}

TEST_CASE("coupled pair: identical inputs give identical paths") {
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  const PhiloxNoise noise(31337);
  const GapVector z0(Window(0, 2), {1.0, 2.0});
  const std::vector<double> g{1.0, 0.5, 0.0};
  const std::vector<double> s{1.0, 1.0, 1.0};
  const auto [a, b] = simulate_coupled_pair(g, g, s, s, z0, z0, cfg, noise);
  CHECK(batches_equal(a, b));
}

TEST_CASE("coupled pair preserves the initial ordering pathwise") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 5.0;
  cfg.record_stride = 10;
  const PhiloxNoise noise(2718);
  const GapVector z0a(Window(0, 1), {0.5});
  const GapVector z0b(Window(0, 1), {1.0});
  const std::vector<double> g{1.0, 0.0};
  const std::vector<double> s{1.0, 1.0};
  const auto [a, b] = simulate_coupled_pair(g, g, s, s, z0a, z0b, cfg, noise);
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t f = 0; f < a.replicas[0].frames.size(); ++f) {
    const double za = a.replicas[0].frames[f].z[0];
    const double zb = b.replicas[0].frames[f].z[0];
    worst = std::max(worst, za - zb);
    if (za > zb + 10.0 * cfg.dt) ++violations;
  }
  CHECK(violations == 0);
  // The shared-noise projection is order preserving, so the positive part
  // vanishes outright at this resolution.
  CHECK(worst <= 0.0);
}

TEST_CASE("coupled pair rejects mismatched windows") {
  SimConfig cfg;
  const PhiloxNoise noise(1);
  const GapVector z0a(Window(0, 1), {0.5});
  const GapVector z0b(Window(0, 2), {0.5, 0.5});
  CHECK_THROWS_AS(simulate_coupled_pair({1.0, 0.0}, {1.0, 0.0, 0.0},
                                        {1.0, 1.0}, {1.0, 1.0, 1.0}, z0a, z0b,
                                        cfg, noise),
                  PreconditionError);
}

TEST_CASE("coupled pair at zero horizon keeps the initial ordering") {
  SimConfig cfg;
  cfg.horizon = 0.0;
  const PhiloxNoise noise(1);
  const GapVector z0a(Window(0, 1), {0.5});
  const GapVector z0b(Window(0, 1), {1.5});
  const std::vector<double> g{1.0, 0.0};
  const std::vector<double> s{1.0, 1.0};
  const auto [a, b] = simulate_coupled_pair(g, g, s, s, z0a, z0b, cfg, noise);
  CHECK(a.replicas[0].frames[0].z[0] <= b.replicas[0].frames[0].z[0]);
}

TEST_CASE("two-sided engine with far tails reduces to the finite core") {
  SimConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  cfg.replicas = 2;
  cfg.record_stride = 10;
  const PhiloxNoise noise(424242);
  const DriftField g = constant_drift(0.0);
  const DiffusionField s = constant_diffusion(1.0);

  TwoSidedInit init;
  init.window = Window(-2, 2);
  init.anchor = 0.0;
  init.law = TwoSidedInit::Law::kNice;
  init.c1 = 1e-3;  // kilounit spacings beyond the window
  init.c2 = 0.0;
  init.explicit_gaps.first = -2;
  init.explicit_gaps.values = {1.0, 0.5, 2.0, 1.5};

  const TwoSidedResult result =
      simulate_two_sided_adaptive(g, s, init, cfg, noise);
  CHECK(result.events.empty());
  check_frame_consistency(result.batch);

  // Same seed addressing reproduces the standalone finite run bit for bit.
  const GapVector z0(init.window, init.explicit_gaps.values);
  const Configuration x0({-2, -1, 0, 1, 2}, positions_from_gaps(z0, 0.0));
  const TrajectoryBatch named = simulate_named_finite(
      std::vector<double>(5, 0.0), std::vector<double>(5, 1.0), x0, cfg, noise);
  REQUIRE(named.replicas.size() == result.batch.replicas.size());
  for (std::size_t r = 0; r < named.replicas.size(); ++r) {
    const auto& fa = result.batch.replicas[r].frames;
    const auto& fb = named.replicas[r].frames;
    REQUIRE(fa.size() == fb.size());
    for (std::size_t f = 0; f < fa.size(); ++f) {
      CHECK(fa[f].x == fb[f].x);
      CHECK(fa[f].y == fb[f].y);
      CHECK(fa[f].z == fb[f].z);
    }
  }
}

TEST_CASE("a scripted dive through the core top is absorbed once") {
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.horizon = 0.05;
  ScriptedNoise noise;
  // The nearest upper tail particle (name 2) starts 0.5 above the core top
  // and is driven far below it in the first step.
  noise.set_normal({0, Series::kNamed, 2, 0}, -50.0);

  const DriftField g = constant_drift(0.0);
  const DiffusionField s = constant_diffusion(1.0);
  TwoSidedInit init;
  init.window = Window(-1, 1);
  init.anchor = 0.0;
  init.c1 = 1e-4;  // dormant ranks beyond the explicit range sit far away
  init.c2 = 0.0;
  init.explicit_gaps.first = -1;
  init.explicit_gaps.values = {1.0, 1.0, 0.5};  // gaps -1, 0, 1

  const TwoSidedResult result =
      simulate_two_sided_adaptive(g, s, init, cfg, noise);
  REQUIRE(result.events.size() == 1);
  const AbsorptionEvent& ev = result.events[0];
  CHECK(ev.name == 2);
  CHECK(ev.side == AbsorptionEvent::Side::kUpper);
  CHECK(ev.time == doctest::Approx(0.01));
  CHECK(ev.core_after == Window(-1, 2));
  CHECK(result.batch.replicas[0].frames.back().names.size() == 4);
  check_frame_consistency(result.batch);
}

TEST_CASE("two-sided engine is deterministic") {
  SimConfig cfg;
  cfg.dt = 5e-3;
  cfg.horizon = 0.5;
  cfg.replicas = 2;
  cfg.record_stride = 20;
  const PhiloxNoise noise(999);
  const DriftField g = step_drift(0.0, 1.0);
  const DiffusionField s = constant_diffusion(1.0);
  TwoSidedInit init;
  init.window = Window(-5, 5);
  init.law = TwoSidedInit::Law::kPiAb;
  init.a = 1.0;
  init.b = 0.0;
  const TwoSidedResult once = simulate_two_sided_adaptive(g, s, init, cfg, noise);
  const TwoSidedResult again = simulate_two_sided_adaptive(g, s, init, cfg, noise);
  CHECK(batches_equal(once.batch, again.batch));
  REQUIRE(once.events.size() == again.events.size());
  for (std::size_t i = 0; i < once.events.size(); ++i) {
    CHECK(once.events[i].time == again.events[i].time);
    CHECK(once.events[i].name == again.events[i].name);
  }
  check_frame_consistency(once.batch);
}

TEST_CASE("two-sided engine rejects inadmissible stationary starts") {
  SimConfig cfg;
  const PhiloxNoise noise(1);
  const DriftField g = step_drift(1.0, 0.0);  // empty admissible region
  const DiffusionField s = constant_diffusion(1.0);
  TwoSidedInit init;
  init.window = Window(-2, 2);
  init.law = TwoSidedInit::Law::kPiAb;
  init.a = 1.0;
  init.b = 0.0;
  CHECK_THROWS_AS(simulate_two_sided_adaptive(g, s, init, cfg, noise),
                  ParametersOutsideSigma);
}

TEST_CASE("ledger monotonicity holds across a multi-gap run") {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 5.0;
  cfg.record_stride = 100;
  const PhiloxNoise noise(808);
  const GapVector z0(Window(0, 3), {0.5, 0.25, 0.5});
  const std::vector<double> g{2.0, 1.0, 0.5, 0.0};
  const std::vector<double> s{1.0, 1.0, 1.0, 1.0};
  const TrajectoryBatch batch = simulate_gap_srbm(g, s, z0, cfg, noise);
  const LocalTimeLedger ledger = ledger_of(batch.replicas[0]);
  for (std::size_t f = 1; f < ledger.cumulative.size(); ++f) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(ledger.cumulative[f][k] >= ledger.cumulative[f - 1][k]);
    }
  }
  CHECK(ledger.cumulative.back()[1] > 0.0);
  CHECK(batch.max_complementarity_residual <= 1e-12);
}
