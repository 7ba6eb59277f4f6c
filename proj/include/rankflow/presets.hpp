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

#ifndef RANKFLOW_PRESETS_HPP_
#define RANKFLOW_PRESETS_HPP_

#include <cmath>
#include <vector>

#include "rankflow/field.hpp"

namespace rankflow {

// Drift that jumps across the 0|1 rank boundary: `below` for n <= 0,
// `above` for n >= 1.
inline DriftField step_drift(double below, double above) {
  return DriftField(0, {below, above}, below, above);
}

// Summable positive drift on the lower ranks: g_n = 2^(n-1) for
// -depth <= n <= 0 (total mass 1 up to the truncated remainder), zero above
// and on both tails.
inline DriftField geometric_lower_drift(int depth) {
  std::vector<double> core;
  core.reserve(static_cast<std::size_t>(depth) + 1);
  for (int n = -depth; n <= 0; ++n) {
    core.push_back(std::ldexp(1.0, n - 1));
  }
  return DriftField(-depth, std::move(core), 0.0, 0.0);
}

}  // namespace rankflow

#endif  // RANKFLOW_PRESETS_HPP_
