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

#include "rankflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "json.hpp"

namespace rankflow {

TwoSidedField::TwoSidedField(int core_lo, std::vector<double> core,
                             double tail_minus, double tail_plus)
    : core_lo_(core_lo),
      core_(std::move(core)),
      tail_minus_(tail_minus),
      tail_plus_(tail_plus) {
  if (core_.empty()) {
    throw PreconditionError("field core must not be empty");
  }
  for (double v : core_) {
    if (!std::isfinite(v)) throw PreconditionError("field core value not finite");
  }
  if (!std::isfinite(tail_minus_) || !std::isfinite(tail_plus_)) {
    throw PreconditionError("field tail value not finite");
  }
}

double TwoSidedField::sum(std::int64_t a, std::int64_t b) const {
  if (a > b) return 0.0;
  const std::int64_t clo = core_lo_;
  const std::int64_t chi = core_hi();
  double total = 0.0;
  if (a < clo) {
    const std::int64_t n_left = std::min(b, clo - 1) - a + 1;
    total += static_cast<double>(n_left) * tail_minus_;
  }
  const std::int64_t ca = std::max(a, clo);
  const std::int64_t cb = std::min(b, chi);
  for (std::int64_t n = ca; n <= cb; ++n) {
    total += core_[static_cast<std::size_t>(n - clo)];
  }
  if (b > chi) {
    const std::int64_t n_right = b - std::max(a, chi + 1) + 1;
    total += static_cast<double>(n_right) * tail_plus_;
  }
  return total;
}

double TwoSidedField::sup_abs() const {
  double m = std::max(std::abs(tail_minus_), std::abs(tail_plus_));
  for (double v : core_) m = std::max(m, std::abs(v));
  return m;
}

double TwoSidedField::sup() const {
  double m = std::max(tail_minus_, tail_plus_);
  for (double v : core_) m = std::max(m, v);
  return m;
}

double TwoSidedField::inf() const {
  double m = std::min(tail_minus_, tail_plus_);
  for (double v : core_) m = std::min(m, v);
  return m;
}

namespace {

nlohmann::json field_to_json(const TwoSidedField& f, const char* minus_key,
                             const char* plus_key) {
  nlohmann::json j;
  j["n_minus"] = f.core_lo();
  j["n_plus"] = f.core_hi();
  j["core"] = f.core();
  j[minus_key] = f.tail_minus();
  j[plus_key] = f.tail_plus();
  return j;
}

struct ParsedField {
  int core_lo;
  std::vector<double> core;
  double tail_minus;
  double tail_plus;
};

ParsedField field_from_json(const std::string& text, const char* minus_key,
                            const char* plus_key) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  for (const char* key : {"n_minus", "n_plus", "core"}) {
    if (!j.contains(key)) throw SchemaError(std::string("/") + key, "missing key");
  }
  if (!j.contains(minus_key)) throw SchemaError(std::string("/") + minus_key, "missing key");
  if (!j.contains(plus_key)) throw SchemaError(std::string("/") + plus_key, "missing key");
  ParsedField p;
  p.core_lo = j.at("n_minus").get<int>();
  const int core_hi = j.at("n_plus").get<int>();
  p.core = j.at("core").get<std::vector<double>>();
  p.tail_minus = j.at(minus_key).get<double>();
  p.tail_plus = j.at(plus_key).get<double>();
  if (core_hi - p.core_lo + 1 != static_cast<int>(p.core.size())) {
    throw SchemaError("/core", "core length does not match [n_minus, n_plus]");
  }
  return p;
}

}  // namespace

std::string DriftField::to_json() const {
  return field_to_json(*this, "g_minus", "g_plus").dump();
}

DriftField DriftField::from_json(const std::string& text) {
  ParsedField p = field_from_json(text, "g_minus", "g_plus");
  return DriftField(p.core_lo, std::move(p.core), p.tail_minus, p.tail_plus);
}

DiffusionField::DiffusionField(int core_lo, std::vector<double> core,
                               double tail_minus, double tail_plus)
    : TwoSidedField(core_lo, std::move(core), tail_minus, tail_plus) {
  for (double v : core_) {
    if (v <= 0.0) throw PreconditionError("diffusion values must be positive");
  }
  if (tail_minus_ <= 0.0 || tail_plus_ <= 0.0) {
    throw PreconditionError("diffusion tails must be positive");
  }
}

std::string DiffusionField::to_json() const {
  return field_to_json(*this, "s_minus", "s_plus").dump();
}

DiffusionField DiffusionField::from_json(const std::string& text) {
  ParsedField p = field_from_json(text, "s_minus", "s_plus");
  return DiffusionField(p.core_lo, std::move(p.core), p.tail_minus, p.tail_plus);
}

DriftField constant_drift(double g) { return DriftField(0, {g}, g, g); }

DiffusionField constant_diffusion(double s) {
  return DiffusionField(0, {s}, s, s);
}

}  // namespace rankflow
