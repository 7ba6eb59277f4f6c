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

#include "rankflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace rankflow {

double exp_rate_mle(const std::vector<double>& sample) {
  if (sample.empty()) throw PreconditionError("empty sample");
  double total = 0.0;
  for (double v : sample) {
    if (!(v > 0.0)) throw PreconditionError("sample values must be positive");
    total += v;
  }
  return static_cast<double>(sample.size()) / total;
}

double ks_asymptotic_p(double statistic, double n_effective) {
  if (statistic <= 0.0) return 1.0;
  const double sn = std::sqrt(n_effective);
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  double p = 0.0;
  double sign = 2.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    sign = -sign;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

KsResult ks_exponential(std::vector<double> sample, double rate) {
  if (sample.empty()) throw PreconditionError("empty sample");
  if (!(rate > 0.0)) throw PreconditionError("rate must be positive");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = 1.0 - std::exp(-rate * sample[i]);
    const double above = (static_cast<double>(i) + 1.0) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return {d, ks_asymptotic_p(d, n)};
}

DominationVerdict domination_test(std::vector<double> lower_sample,
                                  std::vector<double> upper_sample,
                                  double alpha) {
  if (lower_sample.empty() || upper_sample.empty()) {
    throw PreconditionError("empty sample");
  }
  std::sort(lower_sample.begin(), lower_sample.end());
  std::sort(upper_sample.begin(), upper_sample.end());
  const double na = static_cast<double>(lower_sample.size());
  const double nb = static_cast<double>(upper_sample.size());
  // Walk the merged order; S_A - S_B = F_B - F_A jumps at sample points.
  std::size_t ia = 0, ib = 0;
  double d_plus = 0.0;
  while (ia < lower_sample.size() || ib < upper_sample.size()) {
    double xa = ia < lower_sample.size() ? lower_sample[ia]
                                         : std::numeric_limits<double>::infinity();
    double xb = ib < upper_sample.size() ? upper_sample[ib]
                                         : std::numeric_limits<double>::infinity();
    const double x = std::min(xa, xb);
    while (ia < lower_sample.size() && lower_sample[ia] <= x) ++ia;
    while (ib < upper_sample.size() && upper_sample[ib] <= x) ++ib;
    const double fa = static_cast<double>(ia) / na;
    const double fb = static_cast<double>(ib) / nb;
    d_plus = std::max(d_plus, fb - fa);
  }
  DominationVerdict v;
  v.statistic = d_plus;
  v.alpha = alpha;
  const double n_eff = na * nb / (na + nb);
  v.p_value = std::exp(-2.0 * d_plus * d_plus * n_eff);
  v.rejected = v.p_value < alpha;
  return v;
}

namespace {

const Frame& frame_at(const ReplicaTrajectory& traj, double t) {
  for (const Frame& f : traj.frames) {
    if (std::abs(f.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return f;
  }
  throw PreconditionError("no recorded frame at t = " + std::to_string(t));
}

double gap_value(const Frame& f, int index) {
  const int slot = index - f.first_gap;
  if (slot < 0 || slot >= static_cast<int>(f.z.size())) {
    throw PreconditionError("gap index " + std::to_string(index) +
                            " not covered by the batch");
  }
  return f.z[static_cast<std::size_t>(slot)];
}

}  // namespace

std::vector<double> pooled_gap_samples(const TrajectoryBatch& batch,
                                       int gap_index, double burn_in,
                                       std::size_t thin) {
  if (thin < 1) throw PreconditionError("thin must be >= 1");
  std::vector<double> out;
  for (const ReplicaTrajectory& traj : batch.replicas) {
    std::size_t kept = 0;
    for (const Frame& f : traj.frames) {
      if (f.t < burn_in) continue;
      if (kept++ % thin != 0) continue;
      out.push_back(gap_value(f, gap_index));
    }
  }
  return out;
}

GapStatsReport stationarity_report(const TrajectoryBatch& batch,
                                   const RateSequence& target, double burn_in,
                                   const std::vector<int>& central_indices,
                                   double alpha, std::size_t thin) {
  if (central_indices.empty()) {
    throw PreconditionError("no central indices requested");
  }
  GapStatsReport report;
  report.alpha = alpha;
  report.all_ks_pass = true;

  // Per-gap pooled samples plus within-replica lag-1 autocorrelation.
  for (int index : central_indices) {
    GapStats gs;
    gs.index = index;
    gs.target_rate = target.at(index);
    const std::vector<double> sample =
        pooled_gap_samples(batch, index, burn_in, thin);
    if (sample.size() < 100) {
      throw PreconditionError("fewer than 100 post-burn-in samples for gap " +
                              std::to_string(index));
    }
    gs.n = sample.size();
    gs.rate_mle = exp_rate_mle(sample);
    const KsResult ks = ks_exponential(sample, gs.target_rate);
    gs.ks_stat = ks.statistic;
    gs.ks_p = ks.p_value;
    if (ks.p_value <= alpha) report.all_ks_pass = false;

    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= static_cast<double>(sample.size());
    double num = 0.0, den = 0.0;
    for (const ReplicaTrajectory& traj : batch.replicas) {
      std::vector<double> series;
      std::size_t kept = 0;
      for (const Frame& f : traj.frames) {
        if (f.t < burn_in) continue;
        if (kept++ % thin != 0) continue;
        series.push_back(gap_value(f, index));
      }
      for (std::size_t i = 0; i < series.size(); ++i) {
        den += (series[i] - mean) * (series[i] - mean);
        if (i + 1 < series.size()) {
          num += (series[i] - mean) * (series[i + 1] - mean);
        }
      }
    }
    gs.lag1_autocorr = den > 0.0 ? num / den : 0.0;
    report.gaps.push_back(gs);
  }

  // Pairwise correlations over paired (replica, frame) samples.
  const std::size_t k = central_indices.size();
  std::vector<std::vector<double>> pooled(k);
  for (std::size_t i = 0; i < k; ++i) {
    pooled[i] = pooled_gap_samples(batch, central_indices[i], burn_in, thin);
  }
  report.correlation.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const std::vector<double>& a = pooled[i];
      const std::vector<double>& b = pooled[j];
      double ma = 0.0, mb = 0.0;
      for (std::size_t s = 0; s < a.size(); ++s) {
        ma += a[s];
        mb += b[s];
      }
      ma /= static_cast<double>(a.size());
      mb /= static_cast<double>(b.size());
      double cab = 0.0, caa = 0.0, cbb = 0.0;
      for (std::size_t s = 0; s < a.size(); ++s) {
        cab += (a[s] - ma) * (b[s] - mb);
        caa += (a[s] - ma) * (a[s] - ma);
        cbb += (b[s] - mb) * (b[s] - mb);
      }
      const double corr =
          (caa > 0.0 && cbb > 0.0) ? cab / std::sqrt(caa * cbb) : 0.0;
      report.correlation[i][j] = corr;
      report.correlation[j][i] = corr;
      if (central_indices[j] == central_indices[i] + 1) {
        report.max_abs_adjacent_correlation =
            std::max(report.max_abs_adjacent_correlation, std::abs(corr));
      }
    }
  }
  return report;
}

std::string GapStatsReport::to_json() const {
  nlohmann::json j;
  j["alpha"] = alpha;
  j["all_ks_pass"] = all_ks_pass;
  j["max_abs_adjacent_correlation"] = max_abs_adjacent_correlation;
  j["gaps"] = nlohmann::json::array();
  for (const GapStats& g : gaps) {
    j["gaps"].push_back({{"index", g.index},
                         {"n", g.n},
                         {"rate_mle", g.rate_mle},
                         {"target_rate", g.target_rate},
                         {"ks_stat", g.ks_stat},
                         {"ks_p", g.ks_p},
                         {"lag1_autocorr", g.lag1_autocorr}});
  }
  j["correlation"] = correlation;
  return j.dump(2);
}

std::string GapStatsReport::to_csv() const {
  std::ostringstream os;
  os << "index,n,rate_mle,target_rate,ks_stat,ks_p\n";
  os.precision(17);
  for (const GapStats& g : gaps) {
    os << g.index << ',' << g.n << ',' << g.rate_mle << ',' << g.target_rate
       << ',' << g.ks_stat << ',' << g.ks_p << '\n';
  }
  return os.str();
}

DecayDiagnostic decay_diagnostic(const TrajectoryBatch& batch, int gap_index,
                                 const std::vector<double>& times) {
  if (batch.replicas.empty()) throw PreconditionError("empty batch");
  if (times.size() < 2) {
    throw PreconditionError("decay diagnostic needs at least two time points");
  }
  DecayDiagnostic diag;
  diag.gap_index = gap_index;
  for (double t : times) {
    DecayPoint p;
    p.t = t;
    double sum = 0.0, sum2 = 0.0;
    for (const ReplicaTrajectory& traj : batch.replicas) {
      const double v = gap_value(frame_at(traj, t), gap_index);
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(batch.replicas.size());
    p.n = batch.replicas.size();
    p.mean = sum / n;
    const double var = std::max(0.0, sum2 / n - p.mean * p.mean);
    p.half_width = 1.96 * std::sqrt(var / n);
    diag.points.push_back(p);
  }
  const DecayPoint& first = diag.points.front();
  const DecayPoint& last = diag.points.back();
  const double se_first = first.half_width / 1.96;
  const double se_last = last.half_width / 1.96;
  const double se = std::sqrt(se_first * se_first + se_last * se_last);
  diag.trend_z = se > 0.0 ? (first.mean - last.mean) / se : 0.0;
  diag.significant_decrease = diag.trend_z > 3.0;
  return diag;
}

std::string DecayDiagnostic::to_json() const {
  nlohmann::json j;
  j["gap_index"] = gap_index;
  j["trend_z"] = trend_z;
  j["significant_decrease"] = significant_decrease;
  j["points"] = nlohmann::json::array();
  for (const DecayPoint& p : points) {
    j["points"].push_back({{"t", p.t},
                           {"mean", p.mean},
                           {"half_width", p.half_width},
                           {"n", p.n}});
  }
  return j.dump(2);
}

}  // namespace rankflow
