// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_LINALG_HPP
#define NCFACT_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

namespace ncfact {

using Complex = std::complex<double>;
using ScalarMatrix = Eigen::MatrixXcd;

/// Kronecker product a (x) b.
ScalarMatrix kron(const ScalarMatrix& a, const ScalarMatrix& b);

double max_abs(const ScalarMatrix& a);

/// Largest singular value by full SVD. Intended for max(rows, cols) <= 1024;
/// larger matrices should go through operator_norm (power iteration).
double spectral_norm_svd(const ScalarMatrix& a);

/// Power iteration on A*A with a deterministic all-ones start vector and a
/// fixed perturbation retry if the iterate stagnates. Throws ConvergenceError
/// when the iteration cap is reached without meeting rel_tol.
double spectral_norm_power(const ScalarMatrix& a, double rel_tol = 1e-9,
                           int max_iters = 10000);

bool is_unitary_within(const ScalarMatrix& u, double tol = 1e-10);

inline ScalarMatrix identity_matrix(Eigen::Index n) {
  return ScalarMatrix::Identity(n, n);
}

}  // namespace ncfact

#endif  // NCFACT_LINALG_HPP
