#include "chaosflow/quantum_baker.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chaosflow {

namespace {
ComplexMatrix transform(int J, BakerConvention c) {
  return c == BakerConvention::symmetric ? sym_dft_matrix(J) : dft_matrix(J);
}
}  // namespace

QuantumBaker build_quantum_baker(int J, BakerConvention convention) {
  if (J < 2 || J % 2 != 0) throw std::invalid_argument("quantum baker needs even J >= 2");
  const int h = J / 2;
  const ComplexMatrix T = transform(J, convention);
  ComplexMatrix half = ComplexMatrix::Zero(J, J);
  // dft_matrix insists on J >= 2; F_1 is the 1x1 identity.
  const ComplexMatrix Th = (h == 1 && convention == BakerConvention::plain)
                               ? ComplexMatrix::Identity(1, 1)
                               : transform(h, convention);
  half.topLeftCorner(h, h) = Th;
  half.bottomRightCorner(h, h) = Th;
  QuantumBaker qb;
  qb.J = J;
  qb.convention = convention;
  qb.U = T.adjoint() * half;
  return qb;
}

ComplexMatrix momentum_representation(const QuantumBaker& qb) {
  const ComplexMatrix T = transform(qb.J, qb.convention);
  return T * qb.U * T.adjoint();
}

std::vector<double> eigenphases(const QuantumBaker& qb) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(qb.U, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("quantum baker diagonalization failed");
  std::vector<double> ph;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ph.push_back(std::arg(es.eigenvalues()(i)));
  for (auto& p : ph) {
    if (p <= -std::numbers::pi) p += 2.0 * std::numbers::pi;
  }
  std::sort(ph.begin(), ph.end());
  return ph;
}

std::vector<double> return_probabilities(const QuantumBaker& qb, int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  const auto ph = eigenphases(qb);
  std::vector<double> P(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    cplx tr{};
    for (double e : ph) tr += std::polar(1.0, std::remainder(n * e, 2.0 * std::numbers::pi));
    P[n] = std::norm(tr);
  }
  return P;
}

double return_probability(const QuantumBaker& qb, int n) { return return_probabilities(qb, n).back(); }

std::vector<double> return_probabilities_direct(const QuantumBaker& qb, int n_max) {
  std::vector<double> P;
  ComplexMatrix M = ComplexMatrix::Identity(qb.J, qb.J);
  for (int n = 0; n <= n_max; ++n) {
    P.push_back(std::norm(M.trace()));
    M = qb.U * M;
  }
  return P;
}

std::vector<std::pair<int, double>> find_revivals(const QuantumBaker& qb, int n_max, double threshold) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const auto P = return_probabilities(qb, n_max);
  const double J2 = static_cast<double>(qb.J) * qb.J;
  std::vector<std::pair<int, double>> out;
  for (int n = 1; n <= n_max; ++n) {
    const double r = P[n] / J2;
    // Exact revivals come out a few ulps below 1.
    if (r >= threshold - 1e-12) out.emplace_back(n, r);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

ComplexMatrix parity_permutation(int J) {
  ComplexMatrix R = ComplexMatrix::Zero(J, J);
  for (int j = 0; j < J; ++j) R(J - 1 - j, j) = 1.0;
  return R;
}

}  // namespace chaosflow
