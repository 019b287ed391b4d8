#include <doctest.h>

#include <cmath>
#include <vector>

#include "chaosflow/rng.hpp"

using namespace chaosflow;

TEST_CASE("derived streams are reproducible and distinct") {
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
  Rng a = make_stream(1, 0), b = make_stream(1, 0);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("uniform01 stays in [0,1) with the right moments") {
  Rng r(5);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(r);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  // 5 sigma on the mean: sd = sqrt(1/12/n)
  CHECK(std::abs(s / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(s2 / n - 1.0 / 3) < 0.005);
}

TEST_CASE("standard_normal moments") {
  Rng r(11);
  const int n = 200000;
  double s = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(r);
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s / n) < 5 / std::sqrt(double(n)));
  CHECK(std::abs(s2 / n - 1.0) < 5 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 0.1);
}

TEST_CASE("compensated sum recovers what naive summation loses") {
  std::vector<double> v{1e16};
  for (int i = 0; i < 1000; ++i) v.push_back(1.0);
  v.push_back(-1e16);
  double naive = 0;
  for (double x : v) naive += x;
  CHECK(naive != 1000.0);
  CHECK(compensated_sum(v) == 1000.0);
  CompensatedSum c;
  for (double x : v) c += x;
  CHECK(c.value() == 1000.0);
}
