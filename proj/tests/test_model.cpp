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

#include <random>

#include "doctest.h"
#include "rankflow/field.hpp"
#include "rankflow/model.hpp"

using namespace rankflow;

TEST_CASE("rank sorts positions bottom to top") {
  const Configuration c({0, 1, 2}, {3.0, 1.0, 2.0});
  const RankAssignment r = rank(c);
  CHECK(r.permutation == std::vector<int>{1, 2, 0});
}

TEST_CASE("rank breaks ties by ascending name") {
  const Configuration c({5, 2}, {1.0, 1.0});
  const RankAssignment r = rank(c);
  CHECK(r.permutation == std::vector<int>{2, 5});
}

TEST_CASE("rank of sorted distinct positions is the identity") {
  const Configuration c({0, 1, 2, 3}, {-1.0, 0.0, 2.5, 7.0});
  const RankAssignment r = rank(c);
  CHECK(r.permutation == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("ranking an already ranked-and-relabeled configuration is idempotent") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> pos(-5.0, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<int> names;
    std::vector<double> xs;
    for (int i = 0; i < 12; ++i) {
      names.push_back(i);
      xs.push_back(pos(gen));
    }
    const RankAssignment first = rank(Configuration(names, xs));
    // Relabel: particle at rank r gets name r.
    std::vector<double> sorted;
    for (int name : first.permutation) {
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) sorted.push_back(xs[i]);
      }
    }
    std::vector<int> fresh(names.size());
    for (std::size_t i = 0; i < fresh.size(); ++i) fresh[i] = static_cast<int>(i);
    const RankAssignment second = rank(Configuration(fresh, sorted));
    CHECK(second.permutation == fresh);
  }
}

TEST_CASE("rank rejects duplicate names") {
  CHECK_THROWS_AS(Configuration({1, 1}, {0.0, 1.0}), PreconditionError);
}

TEST_CASE("gaps_from_ranked computes adjacent differences") {
  const GapVector z = gaps_from_ranked({0.0, 1.0, 3.0}, Window(0, 2));
  CHECK(z.values == std::vector<double>{1.0, 2.0});
}

TEST_CASE("gaps_from_ranked of a constant vector is zero") {
  const GapVector z = gaps_from_ranked({2.0, 2.0, 2.0, 2.0}, Window(-1, 2));
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("gaps_from_ranked with negative entries in input") {
  const GapVector z = gaps_from_ranked({-2.0, -1.0, 0.0, 4.0}, Window(0, 3));
  CHECK(z.values == std::vector<double>{1.0, 1.0, 4.0});
}

TEST_CASE("gaps_from_ranked rejects decreasing input") {
  CHECK_THROWS_AS(gaps_from_ranked({1.0, 0.5}, Window(0, 1)), PreconditionError);
}

TEST_CASE("phi at zero is zero") {
  const GapVector z(Window(-2, 2), {0.3, 1.0, 2.0, 0.7});
  CHECK(phi(z, 0) == 0.0);
}

TEST_CASE("phi telescopes unit gaps") {
  const GapVector z(Window(-3, 3), std::vector<double>(6, 1.0));
  CHECK(phi(z, 3) == 3.0);
  for (int n = -3; n <= 2; ++n) {
    CHECK(phi(z, n + 1) - phi(z, n) == z.at(n));
  }
}

TEST_CASE("phi at -1 is minus the gap below rank zero") {
  const GapVector z(Window(-1, 1), {2.0, 5.0});
  CHECK(phi(z, -1) == -2.0);
}

TEST_CASE("phi rejects indices outside the window") {
  const GapVector z(Window(-1, 1), {1.0, 1.0});
  CHECK_THROWS_AS(phi(z, 2), PreconditionError);
  CHECK_THROWS_AS(phi(z, -2), PreconditionError);
}

TEST_CASE("positions_from_gaps basic examples") {
  const GapVector z(Window(0, 2), {1.0, 2.0});
  CHECK(positions_from_gaps(z, 0.0) == std::vector<double>{0.0, 1.0, 3.0});

  const GapVector zero(Window(-1, 2), {0.0, 0.0, 0.0});
  for (double y : positions_from_gaps(zero, 4.5)) CHECK(y == 4.5);
}

TEST_CASE("gap vector rejects negative entries") {
  CHECK_THROWS_AS(GapVector(Window(0, 2), {0.5, -0.1}), PreconditionError);
}

TEST_CASE("gaps -> positions -> gaps round trip is exact for dyadic input") {
  const GapVector z(Window(-1, 2), {0.5, 0.25, 4.0});
  const std::vector<double> y = positions_from_gaps(z, 0.0);
  const GapVector back = gaps_from_ranked(y, z.window);
  CHECK(back.values == z.values);
}

TEST_CASE("round trips stay within 1e-12 relative for random input") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> gap(0.0, 3.0);
  std::uniform_real_distribution<double> anchor(-10.0, 10.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> values;
    for (int i = 0; i < 9; ++i) values.push_back(gap(gen));
    const GapVector z(Window(-4, 5), values);
    const double a = anchor(gen);
    const std::vector<double> y = positions_from_gaps(z, a);
    const GapVector back = gaps_from_ranked(y, z.window);
    for (int k = z.first_gap(); k <= z.last_gap(); ++k) {
      CHECK(back.at(k) == doctest::Approx(z.at(k)).epsilon(1e-12));
    }
    for (int n = z.window.lo; n <= z.window.hi; ++n) {
      const double yn = phi(z, n) + a;
      CHECK(yn == doctest::Approx(y[static_cast<std::size_t>(n - z.window.lo)])
                      .epsilon(1e-12));
    }
  }
}

TEST_CASE("drift field evaluates core and constant tails") {
  const DriftField g(-1, {0.5, -0.25, 2.0}, -3.0, 7.0);
  CHECK(g.at(-1) == 0.5);
  CHECK(g.at(0) == -0.25);
  CHECK(g.at(1) == 2.0);
  CHECK(g.at(-2) == -3.0);
  CHECK(g.at(-100) == -3.0);
  CHECK(g.at(2) == 7.0);
  CHECK(g.at(1000000) == 7.0);
  CHECK(g.sup_abs() == 7.0);
}

TEST_CASE("drift field is eventually constant above the core") {
  const DriftField g(0, {1.0, 2.0}, 0.0, 4.0);
  for (int n = g.core_hi() + 1; n < g.core_hi() + 50; ++n) {
    CHECK(g.at(n) == 4.0);
  }
}

TEST_CASE("field sums use exact tail algebra") {
  const DriftField g(0, {1.0, 2.0}, -1.0, 3.0);
  // 5 left-tail entries + core + 3 right-tail entries.
  CHECK(g.sum(-5, 4) == -5.0 + 3.0 + 9.0);
  CHECK(g.sum(2, 1) == 0.0);
  CHECK(g.sum(-1000000, -999998) == -3.0);
}

TEST_CASE("drift prefix telescopes over the drift sequence") {
  const DriftField g(-2, {0.5, 1.0, -1.0, 2.0, 0.25}, -0.5, 1.5);
  CHECK(g.prefix(0) == 0.0);
  for (int m = -8; m <= 8; ++m) {
    CHECK(g.prefix(m + 1) - g.prefix(m) == doctest::Approx(g.at(m)).epsilon(1e-15));
  }
}

TEST_CASE("diffusion field requires positive values") {
  CHECK_THROWS_AS(DiffusionField(0, {1.0, 0.0}, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(DiffusionField(0, {1.0}, -1.0, 1.0), PreconditionError);
}

TEST_CASE("field JSON round trip") {
  const DriftField g(-1, {0.5, -0.25, 2.0}, -3.0, 7.0);
  const DriftField back = DriftField::from_json(g.to_json());
  CHECK(back.core_lo() == g.core_lo());
  CHECK(back.core() == g.core());
  CHECK(back.tail_minus() == g.tail_minus());
  CHECK(back.tail_plus() == g.tail_plus());

  const DiffusionField s(0, {1.0, 2.0}, 0.5, 1.5);
  const DiffusionField s_back = DiffusionField::from_json(s.to_json());
  CHECK(s_back.core() == s.core());
  CHECK(s_back.tail_plus() == 1.5);

  CHECK_THROWS_AS(DriftField::from_json("{\"n_minus\":0}"), SchemaError);
}
