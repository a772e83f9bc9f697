// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "ncfact/errors.hpp"

namespace ncfact {

ScalarMatrix kron(const ScalarMatrix& a, const ScalarMatrix& b) {
  ScalarMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double max_abs(const ScalarMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double spectral_norm_svd(const ScalarMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  if (std::max(a.rows(), a.cols()) <= 16) {
    Eigen::JacobiSVD<ScalarMatrix> svd(a);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<ScalarMatrix> svd(a);
  return svd.singularValues()(0);
}

double spectral_norm_power(const ScalarMatrix& a, double rel_tol, int max_iters) {
  if (a.size() == 0) return 0.0;
  // Iterate on the smaller Gram side.
  const bool tall = a.rows() >= a.cols();
  const Eigen::Index n = tall ? a.cols() : a.rows();

  auto apply = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return tall ? Eigen::VectorXcd(a * v) : Eigen::VectorXcd(a.adjoint() * v);
  };
  auto apply_back = [&](const Eigen::VectorXcd& w) -> Eigen::VectorXcd {
    return tall ? Eigen::VectorXcd(a.adjoint() * w) : Eigen::VectorXcd(a * w);
  };

  Eigen::VectorXcd v = Eigen::VectorXcd::Constant(n, Complex(1.0, 0.0));
  v /= v.norm();

  double sigma_prev = -1.0;
  bool retried = false;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXcd w = apply(v);
    double sigma = w.norm();
    if (sigma == 0.0) {
      if (retried) return 0.0;  // start vector and its perturbation both in the kernel
      retried = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = Complex(1.0 + 0.25 * std::sin(static_cast<double>(i + 1)),
                       0.25 * std::cos(static_cast<double>(3 * i + 1)));
      }
      v /= v.norm();
      sigma_prev = -1.0;
      continue;
    }
    if (sigma_prev >= 0.0 && std::abs(sigma - sigma_prev) <= rel_tol * sigma) {
      return sigma;
    }
    sigma_prev = sigma;
    Eigen::VectorXcd u = apply_back(w);
    double un = u.norm();
    if (un == 0.0) return sigma;
    v = u / un;
  }
  throw ConvergenceError("power iteration did not converge within " +
                         std::to_string(max_iters) + " iterations");
}

bool is_unitary_within(const ScalarMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  ScalarMatrix gram = u.adjoint() * u;
  gram -= ScalarMatrix::Identity(u.rows(), u.cols());
  return max_abs(gram) <= tol;
}

}  // namespace ncfact
