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

#ifndef RANKFLOW_MODEL_HPP_
#define RANKFLOW_MODEL_HPP_

#include <vector>

#include "rankflow/field.hpp"

namespace rankflow {

// A finite set of named particles: distinct integer names with positions.
struct Configuration {
  std::vector<int> names;
  std::vector<double> positions;

  Configuration() = default;
  Configuration(std::vector<int> names_, std::vector<double> positions_);
  std::size_t size() const { return names.size(); }
};

// Bottom-to-top ranking of a configuration. permutation[r] is the name of
// the particle holding rank r (rank slots are 0-based and local to the
// configuration). Ties are resolved by ascending name.
struct RankAssignment {
  std::vector<int> permutation;
};

// Nonnegative spacings z_k, k in [window.lo, window.hi - 1], between
// adjacent ranked particles of a window of ranks.
struct GapVector {
  Window window;
  std::vector<double> values;  // values[i] is the gap above rank window.lo + i

  GapVector() = default;
  GapVector(Window w, std::vector<double> values_);

  double at(int k) const { return values[static_cast<std::size_t>(k - window.lo)]; }
  int first_gap() const { return window.lo; }
  int last_gap() const { return window.hi - 1; }
};

// Sorts positions nondecreasingly, breaking ties by ascending name.
RankAssignment rank(const Configuration& config);

// Adjacent differences of a nondecreasing vector of ranked positions.
// y has window.size() entries, one per rank in the window.
GapVector gaps_from_ranked(const std::vector<double>& ranked_positions,
                           const Window& window);

// Prefix map anchored at rank 0: phi(z, 0) = 0 and
// phi(z, n+1) - phi(z, n) = z_n for every admissible n. The window must
// contain rank 0 and n must lie in [window.lo, window.hi].
double phi(const GapVector& z, int n);

// Ranked positions y_n = anchor + phi(z, n), n in [window.lo, window.hi].
// Inverse of gaps_from_ranked up to the anchor.
std::vector<double> positions_from_gaps(const GapVector& z, double anchor);

}  // namespace rankflow

#endif  // RANKFLOW_MODEL_HPP_
