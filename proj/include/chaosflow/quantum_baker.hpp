#pragma once

#include <utility>
#include <vector>

#include "chaosflow/quantum_core.hpp"

namespace chaosflow {

enum class BakerConvention { plain, symmetric };

struct QuantumBaker {
  int J = 0;
  BakerConvention convention = BakerConvention::symmetric;
  ComplexMatrix U;  // position representation
};

/// U = T_J^{-1} · blockdiag(T_{J/2}, T_{J/2}), T = G (symmetric) or F (plain).
QuantumBaker build_quantum_baker(int J, BakerConvention convention = BakerConvention::symmetric);
/// T_J U T_J^{-1}
ComplexMatrix momentum_representation(const QuantumBaker& qb);

/// Sorted eigenphases in (−π, π].
std::vector<double> eigenphases(const QuantumBaker& qb);

/// |Tr U^n|² for n = 0..n_max, from the eigenphases.
std::vector<double> return_probabilities(const QuantumBaker& qb, int n_max);
double return_probability(const QuantumBaker& qb, int n);
/// Same quantity by repeated multiplication (reference path).
std::vector<double> return_probabilities_direct(const QuantumBaker& qb, int n_max);

/// All 1 ≤ n ≤ n_max with P(n)/J² ≥ threshold, sorted by descending P.
std::vector<std::pair<int, double>> find_revivals(const QuantumBaker& qb, int n_max, double threshold);

/// Reverse-order permutation j → J−1−j (x → 1−x on the half-integer grid).
ComplexMatrix parity_permutation(int J);

}  // namespace chaosflow
