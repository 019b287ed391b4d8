#include "chaosflow/symbolic_dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chaosflow {

namespace {

void require_bits(int N) {
  if (N < 1 || N > kMaxBits) {
    throw std::invalid_argument("bit count N=" + std::to_string(N) + " outside [1," +
                                std::to_string(kMaxBits) + "]");
  }
}

std::uint64_t mask(int N) { return (std::uint64_t{1} << N) - 1; }

}  // namespace

int BitCode::digit(int n) const {
  if (n < 1 || n > N) throw std::out_of_range("digit index");
  return static_cast<int>((bits >> (N - n)) & 1u);
}

BitCode encode_binary(double x, int N) {
  require_bits(N);
  if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("x outside [0,1)");
  // ldexp is exact, floor of an exact product is exact.
  const double scaled = std::floor(std::ldexp(x, N));
  return {static_cast<std::uint64_t>(scaled), N};
}

double decode_binary(const BitCode& b) {
  require_bits(b.N);
  return std::ldexp(static_cast<double>(b.bits), -b.N);
}

std::pair<BitCode, int> shift_step(const BitCode& b, ShiftDirection dir, int incoming) {
  require_bits(b.N);
  if (incoming != 0 && incoming != 1) throw std::invalid_argument("incoming bit must be 0 or 1");
  const std::uint64_t in = static_cast<std::uint64_t>(incoming);
  if (dir == ShiftDirection::up) {
    const int out = static_cast<int>((b.bits >> (b.N - 1)) & 1u);
    return {{((b.bits << 1) | in) & mask(b.N), b.N}, out};
  }
  const int out = static_cast<int>(b.bits & 1u);
  return {{(b.bits >> 1) | (in << (b.N - 1)), b.N}, out};
}

int log2_exact(std::size_t J) {
  if (J < 2 || (J & (J - 1)) != 0) {
    throw std::invalid_argument("J=" + std::to_string(J) + " is not a power of two >= 2");
  }
  int n = 0;
  while ((std::size_t{1} << n) < J) ++n;
  return n;
}

std::vector<std::size_t> PermMatrix::inverse() const {
  std::vector<std::size_t> inv(J);
  for (std::size_t j = 0; j < J; ++j) inv[image[j]] = j;
  return inv;
}

std::vector<std::vector<int>> PermMatrix::dense() const {
  std::vector<std::vector<int>> m(J, std::vector<int>(J, 0));
  for (std::size_t j = 0; j < J; ++j) m[image[j]][j] = 1;
  return m;
}

bool PermMatrix::is_identity() const {
  for (std::size_t j = 0; j < J; ++j) {
    if (image[j] != j) return false;
  }
  return true;
}

PermMatrix PermMatrix::compose(const PermMatrix& after) const {
  if (after.J != J) throw std::invalid_argument("permutation size mismatch");
  PermMatrix out{J, std::vector<std::size_t>(J)};
  for (std::size_t j = 0; j < J; ++j) out.image[j] = after.image[image[j]];
  return out;
}

PermMatrix bernoulli_perm(std::size_t J) {
  const int N = log2_exact(J);
  PermMatrix B{J, std::vector<std::size_t>(J)};
  // Cyclic left rotation of the N-bit cell index: the leading digit that the
  // continuous shift would discard re-enters as the last one.
  for (std::size_t j = 0; j < J; ++j) {
    B.image[j] = ((j << 1) | (j >> (N - 1))) & (J - 1);
  }
  return B;
}

double DiscreteDensity::total() const {
  double s = 0.0;
  for (double v : rho) s += v;
  return s;
}

std::vector<double> discrete_bernoulli_step(const std::vector<double>& rho, const PermMatrix& B) {
  if (rho.size() != B.J) throw std::invalid_argument("density length does not match permutation");
  std::vector<double> out(B.J);
  for (std::size_t j = 0; j < B.J; ++j) out[B.image[j]] = rho[j];
  return out;
}

DiscreteDensity discrete_baker_step(const DiscreteDensity& rho, const PermMatrix& B) {
  if (rho.J != B.J || rho.rho.size() != B.J * B.J) {
    throw std::invalid_argument("density dimension does not match permutation");
  }
  const auto inv = B.inverse();
  DiscreteDensity out{B.J, std::vector<double>(B.J * B.J)};
  // (Bᵗ ρ Bᵗ)_{ij} = ρ_{image(i), image⁻¹(j)}
  for (std::size_t i = 0; i < B.J; ++i) {
    for (std::size_t j = 0; j < B.J; ++j) out.at(i, j) = rho.at(B.image[i], inv[j]);
  }
  return out;
}

int recurrence_period(std::size_t J) {
  const int lb = log2_exact(J);
  const PermMatrix B = bernoulli_perm(J);
  PermMatrix P = B;
  int M = 1;
  while (!P.is_identity()) {
    P = P.compose(B);
    ++M;
    if (M > static_cast<int>(J)) throw std::logic_error("permutation failed to recur");
  }
  if (M != lb) throw std::logic_error("recurrence period differs from lb(J)");
  return M;
}

int baker_recurrence_period(std::size_t J) {
  const PermMatrix B = bernoulli_perm(J);
  DiscreteDensity start{J, std::vector<double>(J * J)};
  for (std::size_t k = 0; k < J * J; ++k) start.rho[k] = static_cast<double>(k);
  DiscreteDensity cur = discrete_baker_step(start, B);
  int M = 1;
  while (cur.rho != start.rho) {
    cur = discrete_baker_step(cur, B);
    ++M;
    if (M > static_cast<int>(J * J)) throw std::logic_error("baker permutation failed to recur");
  }
  return M;
}

}  // namespace chaosflow
