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

#include "rankflow/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rankflow {

namespace {

void append_row(std::ostringstream& os, std::uint32_t replica, double t,
                char kind, int index, double value) {
  os << replica << ',' << t << ',' << kind << ',' << index << ',' << value
     << '\n';
}

template <typename T>
void put(std::string& out, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.append(p, sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& off) {
  if (off + sizeof(T) > in.size()) {
    throw PreconditionError("truncated trajectory stream");
  }
  T v;
  std::memcpy(&v, in.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace

std::string trajectory_to_csv(const TrajectoryBatch& batch,
                              const std::string& stamp) {
  std::ostringstream os;
  os.precision(17);
  os << "# " << stamp << '\n';
  os << "replica,t,series,index,value\n";
  for (const ReplicaTrajectory& traj : batch.replicas) {
    for (const Frame& f : traj.frames) {
      for (std::size_t i = 0; i < f.names.size(); ++i) {
        append_row(os, traj.replica, f.t, 'x', f.names[i], f.x[i]);
      }
      for (std::size_t i = 0; i < f.y.size(); ++i) {
        append_row(os, traj.replica, f.t, 'y', f.first_rank + static_cast<int>(i),
                   f.y[i]);
      }
      for (std::size_t i = 0; i < f.z.size(); ++i) {
        append_row(os, traj.replica, f.t, 'z', f.first_gap + static_cast<int>(i),
                   f.z[i]);
      }
      for (std::size_t i = 0; i < f.local_time.size(); ++i) {
        append_row(os, traj.replica, f.t, 'l', f.first_gap + static_cast<int>(i),
                   f.local_time[i]);
      }
    }
  }
  return os.str();
}

std::string trajectory_to_rkfl(const TrajectoryBatch& batch) {
  std::string out;
  out.append("RKFL", 4);
  put<std::uint16_t>(out, 1);
  put<std::uint64_t>(out, batch.replicas.size());
  for (const ReplicaTrajectory& traj : batch.replicas) {
    put<std::uint32_t>(out, traj.replica);
    put<std::uint64_t>(out, traj.frames.size());
    for (const Frame& f : traj.frames) {
      put<double>(out, f.t);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(f.names.size()));
      for (std::size_t i = 0; i < f.names.size(); ++i) {
        put<std::int32_t>(out, f.names[i]);
        put<double>(out, f.x[i]);
      }
      put<std::int32_t>(out, f.first_rank);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(f.y.size()));
      for (double v : f.y) put<double>(out, v);
      put<std::int32_t>(out, f.first_gap);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(f.z.size()));
      for (double v : f.z) put<double>(out, v);
      put<std::uint8_t>(out, f.local_time.empty() ? 0 : 1);
      if (!f.local_time.empty()) {
        for (double v : f.local_time) put<double>(out, v);
      }
    }
  }
  return out;
}

TrajectoryBatch trajectory_from_rkfl(const std::string& bytes) {
  std::size_t off = 0;
  if (bytes.size() < 6 || bytes.compare(0, 4, "RKFL") != 0) {
    throw PreconditionError("not a trajectory stream (bad magic)");
  }
  off = 4;
  const auto version = get<std::uint16_t>(bytes, off);
  if (version != 1) {
    throw PreconditionError("unsupported trajectory stream version " +
                            std::to_string(version));
  }
  TrajectoryBatch batch;
  const auto n_replicas = get<std::uint64_t>(bytes, off);
  batch.replicas.resize(n_replicas);
  for (std::uint64_t r = 0; r < n_replicas; ++r) {
    ReplicaTrajectory& traj = batch.replicas[r];
    traj.replica = get<std::uint32_t>(bytes, off);
    const auto n_frames = get<std::uint64_t>(bytes, off);
    traj.frames.resize(n_frames);
    for (std::uint64_t fi = 0; fi < n_frames; ++fi) {
      Frame& f = traj.frames[fi];
      f.t = get<double>(bytes, off);
      const auto n_names = get<std::uint32_t>(bytes, off);
      f.names.resize(n_names);
      f.x.resize(n_names);
      for (std::uint32_t i = 0; i < n_names; ++i) {
        f.names[i] = get<std::int32_t>(bytes, off);
        f.x[i] = get<double>(bytes, off);
      }
      f.first_rank = get<std::int32_t>(bytes, off);
      const auto n_y = get<std::uint32_t>(bytes, off);
      f.y.resize(n_y);
      for (std::uint32_t i = 0; i < n_y; ++i) f.y[i] = get<double>(bytes, off);
      f.first_gap = get<std::int32_t>(bytes, off);
      const auto n_z = get<std::uint32_t>(bytes, off);
      f.z.resize(n_z);
      for (std::uint32_t i = 0; i < n_z; ++i) f.z[i] = get<double>(bytes, off);
      const auto has_l = get<std::uint8_t>(bytes, off);
      if (has_l) {
        f.local_time.resize(n_z);
        for (std::uint32_t i = 0; i < n_z; ++i) {
          f.local_time[i] = get<double>(bytes, off);
        }
      }
    }
  }
  return batch;
}

std::string absorption_events_to_jsonl(
    const std::vector<AbsorptionEvent>& events) {
  std::ostringstream os;
  for (const AbsorptionEvent& e : events) {
    nlohmann::json j;
    j["replica"] = e.replica;
    j["time"] = e.time;
    j["name"] = e.name;
    j["side"] = e.side == AbsorptionEvent::Side::kUpper ? "upper" : "lower";
    j["core_after"] = {e.core_after.lo, e.core_after.hi};
    os << j.dump() << '\n';
  }
  return os.str();
}

std::string config_hash(const std::string& canonical_json) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PreconditionError("cannot open " + path + " for writing");
  os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!os) throw PreconditionError("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace rankflow
