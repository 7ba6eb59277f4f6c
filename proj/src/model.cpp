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

#include "rankflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace rankflow {

Configuration::Configuration(std::vector<int> names_,
                             std::vector<double> positions_)
    : names(std::move(names_)), positions(std::move(positions_)) {
  if (names.size() != positions.size()) {
    throw PreconditionError("configuration names/positions length mismatch");
  }
  std::unordered_set<int> seen;
  for (int n : names) {
    if (!seen.insert(n).second) {
      throw PreconditionError("configuration names must be distinct");
    }
  }
  for (double x : positions) {
    if (!std::isfinite(x)) {
      throw PreconditionError("configuration position not finite");
    }
  }
}

GapVector::GapVector(Window w, std::vector<double> values_)
    : window(w), values(std::move(values_)) {
  if (static_cast<int>(values.size()) != window.hi - window.lo) {
    throw PreconditionError("gap vector length must be window size - 1");
  }
  for (double z : values) {
    if (!(z >= 0.0)) {
      throw PreconditionError("gap entries must be nonnegative");
    }
  }
}

RankAssignment rank(const Configuration& config) {
  std::vector<std::size_t> idx(config.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (config.positions[a] != config.positions[b]) {
      return config.positions[a] < config.positions[b];
    }
    return config.names[a] < config.names[b];
  });
  RankAssignment out;
  out.permutation.reserve(config.size());
  for (std::size_t i : idx) out.permutation.push_back(config.names[i]);
  return out;
}

GapVector gaps_from_ranked(const std::vector<double>& ranked_positions,
                           const Window& window) {
  if (static_cast<int>(ranked_positions.size()) != window.size()) {
    throw PreconditionError("ranked positions length must equal window size");
  }
  std::vector<double> gaps;
  gaps.reserve(ranked_positions.size() - 1);
  for (std::size_t i = 0; i + 1 < ranked_positions.size(); ++i) {
    const double d = ranked_positions[i + 1] - ranked_positions[i];
    if (d < 0.0) {
      throw PreconditionError("ranked positions must be nondecreasing");
    }
    gaps.push_back(d);
  }
  return GapVector(window, std::move(gaps));
}

double phi(const GapVector& z, int n) {
  const Window& w = z.window;
  if (!w.contains(0)) {
    throw PreconditionError("phi requires rank 0 inside the window");
  }
  if (!w.contains(n)) {
    throw PreconditionError("phi index outside window");
  }
  double acc = 0.0;
  if (n >= 1) {
    for (int k = 0; k < n; ++k) acc += z.at(k);
  } else if (n <= -1) {
    for (int k = n; k <= -1; ++k) acc -= z.at(k);
  }
  return acc;
}

std::vector<double> positions_from_gaps(const GapVector& z, double anchor) {
  const Window& w = z.window;
  if (!w.contains(0)) {
    throw PreconditionError("positions_from_gaps requires rank 0 inside the window");
  }
  std::vector<double> y(static_cast<std::size_t>(w.size()));
  const auto slot = [&](int n) { return static_cast<std::size_t>(n - w.lo); };
  y[slot(0)] = anchor;
  for (int n = 1; n <= w.hi; ++n) {
    y[slot(n)] = y[slot(n - 1)] + z.at(n - 1);
  }
  for (int n = -1; n >= w.lo; --n) {
    y[slot(n)] = y[slot(n + 1)] - z.at(n);
  }
  return y;
}

}  // namespace rankflow
