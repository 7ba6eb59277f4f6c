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

#ifndef RANKFLOW_IO_HPP_
#define RANKFLOW_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "rankflow/sim.hpp"

namespace rankflow {

// Long-form CSV: one row per (replica, t, series-kind, index, value) with
// series kinds x (by name), y (by rank), z and l (by lower rank of the
// pair). The header comment line carries the provenance stamp.
std::string trajectory_to_csv(const TrajectoryBatch& batch,
                              const std::string& stamp);

// Compact binary frames. Layout (all little-endian):
//   magic "RKFL" | u16 version (= 1) | u64 replica count
//   per replica: u32 replica id | u64 frame count
//   per frame:   f64 t
//                u32 name count   | per particle: i32 name, f64 x
//                i32 first rank   | u32 rank count | f64 y each
//                i32 first gap    | u32 gap count  | f64 z each
//                u8 has_local_time| f64 l each when set
std::string trajectory_to_rkfl(const TrajectoryBatch& batch);
TrajectoryBatch trajectory_from_rkfl(const std::string& bytes);

// One JSON object per line, ordered by (replica, time).
std::string absorption_events_to_jsonl(const std::vector<AbsorptionEvent>& events);

// FNV-1a over the canonical (sorted-key) JSON dump; stable across runs and
// platforms with the same configuration.
std::string config_hash(const std::string& canonical_json);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace rankflow

#endif  // RANKFLOW_IO_HPP_
