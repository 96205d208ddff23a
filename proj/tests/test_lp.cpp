#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "eqkit/lp.hpp"
#include "eqkit/rng.hpp"
#include "lp_oracle.hpp"

using namespace eqkit;
using eqkit::testing::oracle_feasible;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LinearSystem random_system(Rng& rng) {
  return eqkit::testing::random_small_system(rng);
}

}  // namespace

TEST_CASE("feasible interval") {
  LinearSystem sys(2, 1);
  sys.G << 1.0, -1.0;
  sys.h << 1.0, 0.0;
  const auto res = feasible(sys);
  REQUIRE(res.feasible);
  CHECK(res.point[0] >= -kFeasTol);
  CHECK(res.point[0] <= 1.0 + kFeasTol);
}

TEST_CASE("empty interval") {
  LinearSystem sys(2, 1);
  sys.G << 1.0, -1.0;
  sys.h << 0.0, -1.0;
  CHECK_FALSE(feasible(sys).feasible);
}

TEST_CASE("lower bounds participate in the verdict") {
  LinearSystem sys(1, 1);
  sys.G << 1.0;
  sys.h << 0.0;
  sys.lower[0] = 1.0;  // x >= 1 against x <= 0
  CHECK_FALSE(feasible(sys).feasible);

  sys.h << 2.0;
  const auto res = feasible(sys);
  REQUIRE(res.feasible);
  CHECK(res.point[0] >= 1.0 - kFeasTol);
  CHECK(res.point[0] <= 2.0 + kFeasTol);
}

TEST_CASE("returned points satisfy the system within tolerance") {
  Rng rng(101);
  for (int rep = 0; rep < 300; ++rep) {
    const LinearSystem sys = random_system(rng);
    const auto res = feasible(sys);
    if (!res.feasible) continue;
    CHECK(((sys.G * res.point - sys.h).array() <= kFeasTol).all());
    for (int j = 0; j < sys.cols(); ++j)
      if (std::isfinite(sys.lower[j]))
        CHECK(res.point[j] >= sys.lower[j] - kFeasTol);
  }
}

TEST_CASE("row scaling does not change the verdict") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    LinearSystem sys = random_system(rng);
    const bool base = feasible(sys).feasible;
    const int row = static_cast<int>(rng.uniform_index(sys.rows()));
    const double c = rng.uniform(0.1, 10.0);
    sys.G.row(row) *= c;
    sys.h[row] *= c;
    CHECK(feasible(sys).feasible == base);
  }
}

TEST_CASE("determinism: identical input gives identical output") {
  Rng rng(55);
  for (int rep = 0; rep < 50; ++rep) {
    const LinearSystem sys = random_system(rng);
    const auto a = feasible(sys);
    const auto b = feasible(sys);
    CHECK(a.feasible == b.feasible);
    if (a.feasible) CHECK(a.point == b.point);
  }
}

TEST_CASE("agreement with the vertex-enumeration oracle") {
  Rng rng(2024);
  int feasible_count = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const LinearSystem sys = random_system(rng);
    const bool solver = feasible(sys).feasible;
    const bool oracle = oracle_feasible(sys);
    CHECK(solver == oracle);
    if (solver) ++feasible_count;
  }
  // the sweep must exercise both outcomes
  CHECK(feasible_count > 100);
  CHECK(feasible_count < 900);
}

TEST_CASE("dimension mismatch is reported") {
  LinearSystem sys(2, 2);
  sys.h.resize(3);
  CHECK_THROWS_AS(feasible(sys), std::invalid_argument);
}

TEST_CASE("non-finite entries are rejected") {
  LinearSystem sys(1, 1);
  sys.G(0, 0) = kInf;
  sys.h[0] = 1.0;
  CHECK_THROWS_AS(feasible(sys), std::invalid_argument);
}
