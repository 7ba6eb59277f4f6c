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

#include "rankflow/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace rankflow {

double lambda_ab(const DriftField& g, double a, double b, std::int64_t n) {
  return 2.0 * g.prefix(n + 1) + a + b * static_cast<double>(n);
}

RateSequence lambda_ab_sequence(const DriftField& g, double a, double b,
                                int lo, int hi) {
  if (lo > hi) throw PreconditionError("lambda_ab_sequence requires lo <= hi");
  RateSequence seq;
  seq.first = lo;
  seq.provenance = RateProvenance::kAbFamily;
  seq.a = a;
  seq.b = b;
  seq.values.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int n = lo; n <= hi; ++n) {
    seq.values.push_back(lambda_ab(g, a, b, n));
  }
  return seq;
}

IndexedSeries difference_residual(const RateSequence& lam,
                                  const DriftField& g) {
  const bool implicit_boundary =
      lam.provenance == RateProvenance::kFiniteProductForm;
  const int lo = lam.first;
  const int hi = lam.last();
  if (!implicit_boundary && hi - lo < 2) {
    throw PreconditionError(
        "difference residual needs at least three consecutive rates");
  }
  const auto value = [&](int n) -> double {
    if (implicit_boundary && (n == lo - 1 || n == hi + 1)) return 0.0;
    return lam.at(n);
  };
  IndexedSeries out;
  out.first = implicit_boundary ? lo : lo + 1;
  const int last = implicit_boundary ? hi : hi - 1;
  out.values.reserve(static_cast<std::size_t>(last - out.first + 1));
  for (int n = out.first; n <= last; ++n) {
    const double r = 0.5 * value(n - 1) - value(n) + 0.5 * value(n + 1) -
                     (g.at(n + 1) - g.at(n));
    out.values.push_back(r);
  }
  return out;
}

FiniteRatesResult finite_rates(const std::vector<double>& drifts) {
  const int n_particles = static_cast<int>(drifts.size());
  if (n_particles < 2) {
    throw PreconditionError("finite system needs at least two particles");
  }
  // The arithmetic arrangement 2*(S_k - k*avg) is shared verbatim with
  // window_rates so the two routes agree bitwise on [1, N].
  double total = 0.0;
  for (double gk : drifts) total += gk;
  const double avg = total / static_cast<double>(n_particles);

  RateSequence seq;
  seq.first = 1;
  seq.provenance = RateProvenance::kFiniteProductForm;
  seq.window_lo = 1;
  seq.window_hi = n_particles;
  seq.values.reserve(static_cast<std::size_t>(n_particles - 1));
  double prefix = 0.0;
  for (int k = 1; k < n_particles; ++k) {
    prefix += drifts[static_cast<std::size_t>(k - 1)];
    const double mu = 2.0 * (prefix - static_cast<double>(k) * avg);
    if (mu <= 0.0) {
      return StabilityViolation{k, mu};
    }
    seq.values.push_back(mu);
  }
  return seq;
}

double window_rate_at(const DriftField& g, std::int64_t m, std::int64_t n,
                      std::int64_t k) {
  const double avg =
      g.sum(m, n) / static_cast<double>(n - m + 1);
  return 2.0 * (g.sum(m, k) - static_cast<double>(k - m + 1) * avg);
}

WindowRates window_rates(const DriftField& g, const Window& w) {
  WindowRates out;
  out.rates.first = w.lo;
  out.rates.provenance = RateProvenance::kWindowFormula;
  out.rates.window_lo = w.lo;
  out.rates.window_hi = w.hi;
  out.rates.values.reserve(static_cast<std::size_t>(w.hi - w.lo));
  out.assumption1_holds = true;
  for (int k = w.lo; k < w.hi; ++k) {
    const double rate = window_rate_at(g, w.lo, w.hi, k);
    if (rate <= 0.0) out.assumption1_holds = false;
    out.rates.values.push_back(rate);
  }
  return out;
}

std::int64_t first_nonpositive_window_rate(const DriftField& g,
                                           std::int64_t m, std::int64_t n) {
  // lambda_k is affine in k on [m, core_lo-1] and on [core_hi, n-1]; affine
  // pieces are positive everywhere iff positive at both endpoints.
  const std::int64_t clo = g.core_lo();
  const std::int64_t chi = g.core_hi();
  std::vector<std::int64_t> candidates;
  candidates.push_back(m);
  candidates.push_back(n - 1);
  if (clo - 1 >= m && clo - 1 <= n - 1) candidates.push_back(clo - 1);
  for (std::int64_t k = std::max(m, clo); k <= std::min(n - 1, chi); ++k) {
    candidates.push_back(k);
  }
  for (std::int64_t k : candidates) {
    if (window_rate_at(g, m, n, k) <= 0.0) return k;
  }
  return n;  // sentinel: all positive
}

WindowStrategy WindowStrategy::linear(std::int64_t slope, std::int64_t offset) {
  WindowStrategy s;
  s.kind = Kind::kLinear;
  s.n_slope = slope;
  s.n_offset = offset;
  return s;
}

WindowStrategy WindowStrategy::quadratic() {
  WindowStrategy s;
  s.kind = Kind::kQuadratic;
  return s;
}

WindowStrategy WindowStrategy::adaptive(int overshoot_doublings) {
  WindowStrategy s;
  s.kind = Kind::kAdaptive;
  s.overshoot_doublings = overshoot_doublings;
  return s;
}

bool LimitVerdict::all_finite() const {
  return !outcomes.empty() &&
         std::all_of(outcomes.begin(), outcomes.end(), [](const LimitOutcome& o) {
           return o.kind == LimitOutcome::Kind::kFinite;
         });
}

bool LimitVerdict::all_infinite() const {
  return !outcomes.empty() &&
         std::all_of(outcomes.begin(), outcomes.end(), [](const LimitOutcome& o) {
           return o.kind == LimitOutcome::Kind::kInfinite;
         });
}

namespace {

constexpr std::int64_t kWindowCap = std::int64_t{1} << 47;

std::int64_t adaptive_upper_bound(const DriftField& g, std::int64_t m,
                                  std::int64_t prev_n, std::int64_t j,
                                  int overshoot_doublings) {
  std::int64_t n = std::max({prev_n, j * j, m + 1});
  bool found = false;
  while (n <= kWindowCap) {
    if (first_nonpositive_window_rate(g, m, n) == n) {
      found = true;
      break;
    }
    n *= 2;
  }
  if (!found) {
    const std::int64_t base = std::max({prev_n, j * j, m + 1});
    throw AssumptionViolated(
        static_cast<int>(m), static_cast<int>(std::min(base, kWindowCap)),
        static_cast<int>(first_nonpositive_window_rate(g, m, std::min(base, kWindowCap))));
  }
  for (int d = 0; d < overshoot_doublings && n * 2 <= kWindowCap; ++d) {
    if (first_nonpositive_window_rate(g, m, n * 2) != n * 2) break;
    n *= 2;
  }
  return n;
}

}  // namespace

LimitVerdict lambda_limit(const DriftField& g, const WindowStrategy& strategy,
                          const std::vector<int>& tracked,
                          const LimitOptions& options) {
  if (tracked.empty()) {
    throw PreconditionError("lambda_limit requires at least one tracked index");
  }
  LimitVerdict verdict;
  verdict.indices = tracked;
  verdict.outcomes.assign(tracked.size(), LimitOutcome{});

  std::vector<double> prev(tracked.size(),
                           std::numeric_limits<double>::quiet_NaN());
  std::int64_t prev_n = std::numeric_limits<std::int64_t>::min();

  for (std::int64_t j = 1; j <= options.j_max; ++j) {
    const std::int64_t m = 1 - j;
    std::int64_t n = 0;
    switch (strategy.kind) {
      case WindowStrategy::Kind::kLinear:
        n = strategy.n_slope * j + strategy.n_offset;
        break;
      case WindowStrategy::Kind::kQuadratic:
        n = j * j;
        break;
      case WindowStrategy::Kind::kAdaptive:
        n = adaptive_upper_bound(g, m, std::max<std::int64_t>(prev_n, 1), j,
                                 strategy.overshoot_doublings);
        break;
    }
    if (n <= m) {
      throw PreconditionError("window strategy produced an empty window");
    }
    if (n < prev_n) {
      throw PreconditionError("window strategy must not shrink the window");
    }
    prev_n = n;

    const std::int64_t bad = first_nonpositive_window_rate(g, m, n);
    if (bad != n) {
      throw AssumptionViolated(static_cast<int>(m), static_cast<int>(n),
                               static_cast<int>(bad));
    }

    bool all_conclusive = true;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
      const std::int64_t k = tracked[i];
      if (k < m || k >= n) {
        all_conclusive = false;  // not yet covered by the window
        continue;
      }
      const double rate = window_rate_at(g, m, n, k);
      LimitOutcome& o = verdict.outcomes[i];
      if (!std::isnan(prev[i]) && rate < prev[i] - 1e-9 * std::max(1.0, std::abs(prev[i]))) {
        throw std::logic_error("window rates lost monotonicity across nested windows");
      }
      if (rate > options.divergence_threshold) {
        o.kind = LimitOutcome::Kind::kInfinite;  // monotone: stays above
        o.value = rate;
      } else if (o.kind != LimitOutcome::Kind::kInfinite) {
        if (!std::isnan(prev[i]) && std::abs(rate - prev[i]) < options.tol) {
          o.kind = LimitOutcome::Kind::kFinite;
        } else {
          o.kind = LimitOutcome::Kind::kInconclusive;
          all_conclusive = false;
        }
        o.value = rate;
      }
      prev[i] = rate;
      if (o.kind == LimitOutcome::Kind::kInconclusive) all_conclusive = false;
    }
    verdict.j_used = j;
    if (all_conclusive) break;
  }

  const bool any_finite = std::any_of(
      verdict.outcomes.begin(), verdict.outcomes.end(),
      [](const LimitOutcome& o) { return o.kind == LimitOutcome::Kind::kFinite; });
  const bool any_infinite = std::any_of(
      verdict.outcomes.begin(), verdict.outcomes.end(),
      [](const LimitOutcome& o) { return o.kind == LimitOutcome::Kind::kInfinite; });
  if (any_finite && any_infinite) {
    // The dichotomy lemma rules this out for nested admissible windows.
    throw std::logic_error("mixed finite/infinite window-rate limits");
  }
  return verdict;
}

double SigmaRegion::a_min(double b) const {
  if (empty_ || b < b_min_ || b > b_max_) {
    throw PreconditionError("slope outside the admissible interval");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [slope, intercept] : lines_) {
    best = std::max(best, intercept + slope * b);
  }
  return best;
}

bool SigmaRegion::contains(double a, double b) const {
  if (empty_ || b < b_min_ || b > b_max_) return false;
  return a > a_min(b);
}

std::string SigmaRegion::to_json() const {
  nlohmann::json j;
  j["empty"] = empty_;
  if (!empty_) {
    j["b_min"] = b_min_;
    j["b_max"] = b_max_;
    nlohmann::json bps = nlohmann::json::array();
    for (const auto& [b, a] : breakpoints_) {
      bps.push_back({b, a});
    }
    j["breakpoints"] = bps;
  } else {
    j["b_min"] = nullptr;
    j["b_max"] = nullptr;
    j["breakpoints"] = nlohmann::json::array();
  }
  return j.dump();
}

SigmaRegion sigma_region(const DriftField& g) {
  SigmaRegion region;
  region.b_min_ = -2.0 * g.tail_plus();
  region.b_max_ = -2.0 * g.tail_minus();
  region.empty_ = region.b_min_ > region.b_max_;
  if (region.empty_) return region;

  // Candidate indices: the tail minima sit at core_lo - 1 and core_hi for
  // every admissible slope, so [core_lo - 1, core_hi] decides a_min exactly.
  for (int n = g.core_lo() - 1; n <= g.core_hi(); ++n) {
    const double slope = -static_cast<double>(n);
    const double intercept = -2.0 * g.prefix(n + 1);
    region.lines_.emplace_back(slope, intercept);
  }

  // Upper envelope over [b_min, b_max] for reporting.
  auto lines = region.lines_;
  std::sort(lines.begin(), lines.end());
  std::vector<std::pair<double, double>> hull;  // (slope, intercept)
  for (const auto& ln : lines) {
    if (!hull.empty() && hull.back().first == ln.first) {
      if (ln.second <= hull.back().second) continue;
      hull.pop_back();
    }
    while (hull.size() >= 2) {
      // Drop the middle line if the new line overtakes the second-to-last
      // one no later than the last one did.
      const auto& [s1, c1] = hull[hull.size() - 2];
      const auto& [s2, c2] = hull.back();
      const double x_new = (c1 - ln.second) / (ln.first - s1);
      const double x_mid = (c1 - c2) / (s2 - s1);
      if (x_new <= x_mid) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(ln);
  }

  const auto eval_hull = [&](double b) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [s, c] : hull) best = std::max(best, c + s * b);
    return best;
  };

  region.breakpoints_.emplace_back(region.b_min_, eval_hull(region.b_min_));
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const auto& [s1, c1] = hull[i];
    const auto& [s2, c2] = hull[i + 1];
    const double bx = (c1 - c2) / (s2 - s1);
    if (bx > region.b_min_ && bx < region.b_max_) {
      region.breakpoints_.emplace_back(bx, eval_hull(bx));
    }
  }
  if (region.b_max_ > region.b_min_) {
    region.breakpoints_.emplace_back(region.b_max_, eval_hull(region.b_max_));
  }
  return region;
}

GapVector sample_pi_ab(const DriftField& g, double a, double b,
                       const Window& w, const NoiseStream& noise,
                       std::uint32_t replica) {
  const SigmaRegion region = sigma_region(g);
  if (!region.contains(a, b)) {
    throw ParametersOutsideSigma(a, b);
  }
  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(w.hi - w.lo));
  for (int n = w.lo; n < w.hi; ++n) {
    const double rate = lambda_ab(g, a, b, n);
    const double u = noise.uniform({replica, Series::kPiSample, n, 0});
    gaps.push_back(-std::log(u) / rate);
  }
  return GapVector(w, std::move(gaps));
}

}  // namespace rankflow
