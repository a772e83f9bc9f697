// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_REPNORM_HPP
#define NCFACT_REPNORM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ncfact/matpoly.hpp"
#include "ncfact/rng.hpp"

namespace ncfact {

/// An assignment of a concrete unitary matrix to each generator index. Every
/// matrix is checked against || U*U - I ||_max <= 1e-10 on construction.
struct Representation {
  Eigen::Index dim = 0;
  std::map<int, ScalarMatrix> unitaries;
  std::string label;
};

inline constexpr double kUnitarityTol = 1e-10;

Representation make_representation(Eigen::Index dim, std::map<int, ScalarMatrix> unitaries,
                                   std::string label);

enum class EnsembleKind { haar_unitary, uniform_permutation, circulant_shift };

std::string ensemble_kind_name(EnsembleKind kind);
EnsembleKind ensemble_kind_from_name(const std::string& name);

/// A deterministic recipe for a sequence of random representations. The
/// per-sample randomness stream is derived statelessly from
/// (seed, sample_index, generator_index), so samples may be drawn in any
/// order and on any thread with bit-identical results.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::haar_unitary;
  int dim = 1;
  int gen_count = 1;
  std::uint64_t seed = 0;
  int samples = 1;
};

/// Haar-distributed unitary: complex Ginibre matrix, QR, then column phase
/// correction so the factorization is distribution-exact.
ScalarMatrix haar_unitary(Eigen::Index n, RandomStream& stream);

/// Uniform permutation matrix via an unbiased shuffle.
ScalarMatrix random_permutation_matrix(Eigen::Index n, RandomStream& stream);

/// The cyclic shift on n points (order n, eigenvalues the n-th roots of unity).
ScalarMatrix circulant_shift_matrix(Eigen::Index n);

/// Deterministic commutative test family: every generator j <= gen_count is
/// the same cyclic shift, so single-generator norms reduce to a maximum of
/// the scalar symbol over the n-th roots of unity.
Representation shift_representation(Eigen::Index n, int gen_count);

/// One realization of the ensemble.
Representation sample_representation(const EnsembleSpec& spec, int sample_index);

/// Evaluates p under R: each term a (x) w becomes kron(a, rho(w)) where
/// rho(w) is the product of the letter matrices (starred letter -> adjoint).
/// Result shape (p.rows * N, p.cols * N). Throws InputError when a generator
/// in the support has no assigned unitary.
ScalarMatrix eval(const MatPoly& p, const Representation& rep);

ScalarMatrix eval_word(const Word& w, const Representation& rep);

enum class NormMethod { full_svd, power_iteration };

struct NormEstimate {
  double value = 0.0;
  NormMethod method = NormMethod::full_svd;
  double rel_tol = 0.0;
  std::string representation_label;
};

/// Largest singular value. Full SVD up to max dimension 1024, power iteration
/// (rel tol 1e-9, cap 10^4 iterations, deterministic start) beyond that.
NormEstimate operator_norm(const ScalarMatrix& a);

NormEstimate eval_norm(const MatPoly& p, const Representation& rep);

struct NormSummary {
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
  std::vector<double> per_sample;
};

/// Order statistics of || eval(p, R_i) || over the ensemble's samples.
/// Deterministic given the spec; samples are evaluated in parallel.
NormSummary proxy_norm(const MatPoly& p, const EnsembleSpec& spec, int threads = 0);

}  // namespace ncfact

#endif  // NCFACT_REPNORM_HPP
