#include <doctest.h>

#include <numeric>
#include <vector>

#include "chaosflow/maps_classical.hpp"
#include "chaosflow/symbolic_dynamics.hpp"

using namespace chaosflow;

TEST_CASE("binary codes") {
  const auto b = encode_binary(0.625, 3);  // .101
  CHECK(b.bits == 5u);
  CHECK(b.digit(1) == 1);
  CHECK(b.digit(2) == 0);
  CHECK(b.digit(3) == 1);
  CHECK(decode_binary(b) == 0.625);
  CHECK(decode_binary(encode_binary(0.3, 40)) == doctest::Approx(0.3).epsilon(1e-11));
  CHECK_THROWS(encode_binary(0.5, 63));
  CHECK_THROWS(encode_binary(1.0, 8));
}

TEST_CASE("upward shift with a zero is the Bernoulli map on dyadic points") {
  const int N = 12;
  for (std::uint64_t k = 0; k < (1u << N); k += 37) {
    const double x = std::ldexp(double(k), -N);
    const auto [b, out] = shift_step(encode_binary(x, N), ShiftDirection::up, 0);
    CHECK(decode_binary(b) == bernoulli_step(x));
    CHECK(out == (x >= 0.5 ? 1 : 0));
  }
}

TEST_CASE("an up/down pair conserves bits") {
  const BitCode b{0b1011001u, 7};
  const auto [u, lost] = shift_step(b, ShiftDirection::up, 1);
  const auto [d, back] = shift_step(u, ShiftDirection::down, lost);
  CHECK(d == b);
  CHECK(back == 1);
}

TEST_CASE("B_8 as printed") {
  const int expected[8][8] = {{1, 0, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0, 0},
                              {0, 0, 0, 0, 0, 1, 0, 0}, {0, 0, 1, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 1, 0},
                              {0, 0, 0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0, 0, 1}};
  const auto d = bernoulli_perm(8).dense();
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) CHECK(d[i][j] == expected[i][j]);
  }
}

TEST_CASE("permutation structure") {
  for (std::size_t J = 2; J <= 1024; J *= 2) {
    const auto B = bernoulli_perm(J);
    const auto d = J <= 64 ? B.dense() : std::vector<std::vector<int>>{};
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(std::accumulate(d[i].begin(), d[i].end(), 0) == 1);
      int col = 0;
      for (std::size_t j = 0; j < d.size(); ++j) col += d[j][i];
      CHECK(col == 1);
    }
    // zipper: j -> 2j mod (J-1), last cell fixed
    for (std::size_t j = 0; j + 1 < J; ++j) CHECK(B.image[j] == (2 * j) % (J - 1));
    CHECK(B.image[J - 1] == J - 1);
  }
  CHECK_THROWS(bernoulli_perm(12));
  CHECK_THROWS(bernoulli_perm(1));
}

TEST_CASE("J=4 brute force: applying twice is the identity") {
  const auto B = bernoulli_perm(4);
  CHECK(!B.is_identity());
  CHECK(B.compose(B).is_identity());
  CHECK(B.image == std::vector<std::size_t>{0, 2, 1, 3});
}

TEST_CASE("recurrence periods are lb(J) and minimal") {
  CHECK(recurrence_period(2) == 1);
  CHECK(recurrence_period(8) == 3);
  CHECK(recurrence_period(16) == 4);
  for (std::size_t J = 2; J <= 4096; J *= 2) {
    const int M = log2_exact(J);
    auto B = bernoulli_perm(J);
    PermMatrix P = B;
    for (int m = 1; m < M; ++m) {
      CHECK(!P.is_identity());
      P = P.compose(B);
    }
    CHECK(P.is_identity());
  }
  for (std::size_t J = 2; J <= 64; J *= 2) CHECK(baker_recurrence_period(J) == log2_exact(J));
}

TEST_CASE("discrete Bernoulli agrees with the continuous map on the upper bits") {
  // x_j = j/J; the map is exact except for the wrapped lowest bit.
  const std::size_t J = 64;
  const auto B = bernoulli_perm(J);
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<double> rho(J, 0.0);
    rho[j] = 1.0;
    const auto out = discrete_bernoulli_step(rho, B);
    const std::size_t k = std::find(out.begin(), out.end(), 1.0) - out.begin();
    const double x = double(j) / J;
    CHECK(k / 2 == std::size_t(bernoulli_step(x) * J) / 2);
  }
}

TEST_CASE("discrete baker") {
  const std::size_t J = 16;
  const auto B = bernoulli_perm(J);
  DiscreteDensity u{J, std::vector<double>(J * J, 1.0 / (J * J))};
  CHECK(discrete_baker_step(u, B).rho == u.rho);

  DiscreteDensity d{J, std::vector<double>(J * J, 0.0)};
  d.at(0, 0) = 1.0;
  auto e = d;
  for (int n = 0; n < 7; ++n) {
    e = discrete_baker_step(e, B);
    CHECK(std::count(e.rho.begin(), e.rho.end(), 1.0) == 1);
  }

  DiscreteDensity r{J, std::vector<double>(J * J)};
  Rng rng(4);
  for (auto& x : r.rho) x = uniform01(rng);
  auto s = r;
  for (int n = 0; n < 4; ++n) {
    s = discrete_baker_step(s, B);
    if (n < 3) CHECK(s.rho != r.rho);
  }
  CHECK(s.rho == r.rho);
  CHECK(s.total() == r.total());
  CHECK_THROWS(discrete_baker_step(DiscreteDensity{8, std::vector<double>(64)}, B));
}
