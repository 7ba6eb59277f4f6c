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
#include <functional>
#include <string>

#include "rankflow/parallel.hpp"
#include "rankflow/sim.hpp"

namespace rankflow {

namespace {

using GapFn = std::function<double(int)>;

// Lazily extended initial positions of one side's dormant particles.
// Positions are anchored at the adjacent initial core boundary and extended
// outward with spacing draws, so any dormant index has a reproducible
// initial position.
class DormantFrontier {
 public:
  DormantFrontier(int first_name, int direction, double boundary_position)
      : next_name_(first_name),
        direction_(direction),
        edge_(boundary_position) {}

  int next_name() const { return next_name_; }

  // Initial position of the next dormant particle on this side.
  double peek(const GapFn& gap_at) const {
    // The gap between names n and n+1 carries index n.
    const int gap_index = direction_ > 0 ? next_name_ - 1 : next_name_;
    return edge_ + direction_ * gap_at(gap_index);
  }

  void advance(const GapFn& gap_at) {
    edge_ = peek(gap_at);
    next_name_ += direction_;
  }

 private:
  int next_name_;
  int direction_;  // +1 upper side, -1 lower side
  double edge_;    // initial position of the last consumed particle
};

struct TailParticle {
  int name;
  double x;
};

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

}  // namespace

TwoSidedResult simulate_two_sided_adaptive(const DriftField& g,
                                           const DiffusionField& s,
                                           const TwoSidedInit& init,
                                           const SimConfig& cfg,
                                           const NoiseStream& noise,
                                           const TwoSidedOptions& options) {
  cfg.validate();
  const Window w = init.window;
  if (!w.contains(0)) {
    throw PreconditionError("initial core window must contain rank 0");
  }
  if (init.law == TwoSidedInit::Law::kPiAb &&
      !sigma_region(g).contains(init.a, init.b)) {
    throw ParametersOutsideSigma(init.a, init.b);
  }

  const double g_bar = g.sup_abs();
  const double s_bar = s.sup();
  const std::size_t steps = cfg.step_count();
  const double sqrt_dt = std::sqrt(cfg.dt);

  TwoSidedResult result;
  result.batch.config = cfg;
  result.batch.replicas.resize(cfg.replicas);
  std::vector<std::vector<AbsorptionEvent>> per_replica_events(cfg.replicas);

  parallel_for(cfg.replicas, [&](std::size_t rr) {
    const std::uint32_t replica = static_cast<std::uint32_t>(rr);

    // Initial spacing between ranks n and n+1; explicit values win, the
    // configured law covers everything else. Draws are addressed by gap
    // index, so extending the frontier never perturbs earlier draws.
    const GapFn gap_at = [&](int n) -> double {
      const auto& ex = init.explicit_gaps;
      if (!ex.values.empty() && n >= ex.first &&
          n < ex.first + static_cast<int>(ex.values.size())) {
        const double v = ex.values[static_cast<std::size_t>(n - ex.first)];
        if (!(v > 0.0)) {
          throw PreconditionError("initial spacings must be strictly positive");
        }
        return v;
      }
      double rate = 0.0;
      if (init.law == TwoSidedInit::Law::kNice) {
        rate = init.c1 + init.c2 * std::abs(static_cast<double>(n));
      } else {
        rate = lambda_ab(g, init.a, init.b, n);
      }
      const double u = noise.uniform({replica, Series::kInitGap, n, 0});
      return -std::log(u) / rate;
    };

    // Core members (names never leave; absorbed tails join).
    std::vector<int> names;
    std::vector<double> x;
    names.reserve(static_cast<std::size_t>(w.size()) + 16);
    x.reserve(static_cast<std::size_t>(w.size()) + 16);
    {
      double pos = init.anchor;
      for (int n = 0; n >= w.lo; --n) {
        names.insert(names.begin(), n);
        x.insert(x.begin(), pos);
        if (n > w.lo) pos -= gap_at(n - 1);
      }
      pos = init.anchor;
      for (int n = 1; n <= w.hi; ++n) {
        pos += gap_at(n - 1);
        names.push_back(n);
        x.push_back(pos);
      }
    }
    int cur_lo = w.lo;
    int cur_hi = w.hi;
    std::vector<std::size_t> order(names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    insertion_rerank(x, names, order);

    DormantFrontier upper(w.hi + 1, +1, x[order.back()]);
    DormantFrontier lower(w.lo - 1, -1, x[order.front()]);
    // Frontier edges anchor at the outermost *initial* positions, which by
    // ranked initial conditions are the window boundary particles.
    std::vector<TailParticle> upper_tails;
    std::vector<TailParticle> lower_tails;
    std::size_t absorptions = 0;

    ReplicaTrajectory traj;
    traj.replica = replica;
    std::vector<AbsorptionEvent>& events = per_replica_events[rr];

    const auto record = [&](double t) {
      Frame f;
      f.t = t;
      f.names = names;
      f.x = x;
      f.first_rank = cur_lo;
      f.first_gap = cur_lo;
      f.y.reserve(order.size());
      for (std::size_t i : order) f.y.push_back(x[i]);
      f.z.reserve(order.size() - 1);
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        f.z.push_back(f.y[k + 1] - f.y[k]);
      }
      traj.frames.push_back(std::move(f));
    };

    // Instantiates dormant particles whose chance of reaching the current
    // hull within the remaining horizon exceeds activation_eps. A particle
    // activated at time t > 0 receives its free-Brownian position at t.
    std::size_t instantiated = 0;
    const auto activate = [&](double t, std::uint64_t step) {
      const double t_rem = cfg.horizon - t;
      if (t_rem <= 0.0) return;
      const double hull_top = x[order.back()];
      const double hull_bot = x[order.front()];
      while (true) {
        const double x0 = upper.peek(gap_at);
        const double dist = x0 - hull_top;
        if (normal_tail((dist - g_bar * t_rem) / (s_bar * std::sqrt(t_rem))) <=
            options.activation_eps) {
          break;
        }
        const int name = upper.next_name();
        upper.advance(gap_at);
        double pos = x0;
        if (t > 0.0) {
          const double xi = noise.normal({replica, Series::kTailSpawn, name, step});
          pos += g.tail_plus() * t + s.tail_plus() * std::sqrt(t) * xi;
        }
        upper_tails.push_back({name, pos});
        if (++instantiated > options.max_instantiations) {
          throw NumericalError("tail instantiation count exceeded " +
                               std::to_string(options.max_instantiations));
        }
      }
      while (true) {
        const double x0 = lower.peek(gap_at);
        const double dist = hull_bot - x0;
        if (normal_tail((dist - g_bar * t_rem) / (s_bar * std::sqrt(t_rem))) <=
            options.activation_eps) {
          break;
        }
        const int name = lower.next_name();
        lower.advance(gap_at);
        double pos = x0;
        if (t > 0.0) {
          const double xi = noise.normal({replica, Series::kTailSpawn, name, step});
          pos += g.tail_minus() * t + s.tail_minus() * std::sqrt(t) * xi;
        }
        lower_tails.push_back({name, pos});
        if (++instantiated > options.max_instantiations) {
          throw NumericalError("tail instantiation count exceeded " +
                               std::to_string(options.max_instantiations));
        }
      }
    };

    activate(0.0, 0);
    record(0.0);

    for (std::size_t step = 0; step < steps; ++step) {
      // Core: rank-based coefficients, one increment per name.
      for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        const int rank = cur_lo + static_cast<int>(k);
        const double xi = noise.normal(
            {replica, Series::kNamed, names[i], static_cast<std::uint64_t>(step)});
        x[i] += g.at(rank) * cfg.dt + s.at(rank) * sqrt_dt * xi;
        if (!std::isfinite(x[i])) {
          throw NumericalError("position overflow in replica " +
                               std::to_string(replica) + " at step " +
                               std::to_string(step));
        }
      }
      insertion_rerank(x, names, order);
      // Instantiated tails: free Brownian motion with tail coefficients.
      for (TailParticle& p : upper_tails) {
        const double xi = noise.normal(
            {replica, Series::kNamed, p.name, static_cast<std::uint64_t>(step)});
        p.x += g.tail_plus() * cfg.dt + s.tail_plus() * sqrt_dt * xi;
      }
      for (TailParticle& p : lower_tails) {
        const double xi = noise.normal(
            {replica, Series::kNamed, p.name, static_cast<std::uint64_t>(step)});
        p.x += g.tail_minus() * cfg.dt + s.tail_minus() * sqrt_dt * xi;
      }

      const double t_now = static_cast<double>(step + 1) * cfg.dt;

      // Crossing detection at the frame boundary: a tail particle at or past
      // the extreme ranked core particle joins the core.
      const double hull_top = x[order.back()];
      for (std::size_t i = 0; i < upper_tails.size();) {
        if (upper_tails[i].x <= hull_top) {
          const TailParticle p = upper_tails[i];
          upper_tails.erase(upper_tails.begin() + static_cast<std::ptrdiff_t>(i));
          names.push_back(p.name);
          x.push_back(p.x);
          order.push_back(x.size() - 1);
          insertion_rerank(x, names, order);
          cur_hi += 1;
          if (++absorptions > options.max_absorptions) {
            throw ExhaustedTailBudget(options.max_absorptions);
          }
          events.push_back({replica, t_now, p.name, AbsorptionEvent::Side::kUpper,
                            Window(cur_lo, cur_hi)});
        } else {
          ++i;
        }
      }
      const double hull_bot = x[order.front()];
      for (std::size_t i = 0; i < lower_tails.size();) {
        if (lower_tails[i].x >= hull_bot) {
          const TailParticle p = lower_tails[i];
          lower_tails.erase(lower_tails.begin() + static_cast<std::ptrdiff_t>(i));
          names.push_back(p.name);
          x.push_back(p.x);
          order.push_back(x.size() - 1);
          insertion_rerank(x, names, order);
          cur_lo -= 1;
          if (++absorptions > options.max_absorptions) {
            throw ExhaustedTailBudget(options.max_absorptions);
          }
          events.push_back({replica, t_now, p.name, AbsorptionEvent::Side::kLower,
                            Window(cur_lo, cur_hi)});
        } else {
          ++i;
        }
      }

      activate(t_now, static_cast<std::uint64_t>(step));
      if ((step + 1) % cfg.record_stride == 0 || step + 1 == steps) {
        record(t_now);
      }
    }
    result.batch.replicas[rr] = std::move(traj);
  });

  for (auto& ev : per_replica_events) {
    result.events.insert(result.events.end(), ev.begin(), ev.end());
  }
  return result;
}

}  // namespace rankflow
