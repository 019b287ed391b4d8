#pragma once

// Binary-shift coding of the Bernoulli and baker maps and their finite
// (permutation) discretizations on J = 2^N cells.

#include <cstdint>
#include <utility>
#include <vector>

namespace chaosflow {

/// Truncated binary expansion x = Σ_{n=1}^{N} a_n 2^{-n}. The digits are
/// packed into `bits` with a_1 as the most significant of the low N bits.
struct BitCode {
  std::uint64_t bits = 0;
  int N = 1;

  int digit(int n) const;  // a_n, 1-based
  bool operator==(const BitCode&) const = default;
};

inline constexpr int kMaxBits = 62;

BitCode encode_binary(double x, int N);
double decode_binary(const BitCode& b);

enum class ShiftDirection { up, down };

/// up: drop a_1, append `incoming` as a_N, return a_1.
/// down: prepend `incoming` as a_1, drop a_N, return a_N.
std::pair<BitCode, int> shift_step(const BitCode& b, ShiftDirection dir, int incoming);

/// Index-array permutation on J cells. `image[j]` is the cell that the
/// content of cell j is carried to in one step.
struct PermMatrix {
  std::size_t J = 0;
  std::vector<std::size_t> image;

  std::vector<std::size_t> inverse() const;
  /// Dense 0/1 form with B(image[j], j) = 1, for display and tests.
  std::vector<std::vector<int>> dense() const;
  bool is_identity() const;
  PermMatrix compose(const PermMatrix& after) const;  // `after` ∘ this
};

/// lb(J) for J a power of two ≥ 2; throws otherwise.
int log2_exact(std::size_t J);

PermMatrix bernoulli_perm(std::size_t J);

/// J×J row-major density, rows indexed by the p cell, columns by the x cell.
struct DiscreteDensity {
  std::size_t J = 0;
  std::vector<double> rho;

  double& at(std::size_t p, std::size_t x) { return rho[p * J + x]; }
  double at(std::size_t p, std::size_t x) const { return rho[p * J + x]; }
  double total() const;
};

/// One step of the vector map ρ' = B ρ.
std::vector<double> discrete_bernoulli_step(const std::vector<double>& rho, const PermMatrix& B);
/// One step of the similarity map ρ' = Bᵗ ρ Bᵗ (pure index permutation).
DiscreteDensity discrete_baker_step(const DiscreteDensity& rho, const PermMatrix& B);

/// Smallest M ≥ 1 with B^M = 1, found by explicit iteration; throws if the
/// result disagrees with lb(J).
int recurrence_period(std::size_t J);
/// Same, but iterating the discrete baker map on a density with all cells
/// distinct until it returns.
int baker_recurrence_period(std::size_t J);

}  // namespace chaosflow
