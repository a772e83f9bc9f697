// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Constructive factorization of matrix-valued *-polynomials into an
// alternating chain
//
//     x = alpha_0 D_1 alpha_1 ... D_m alpha_m
//
// where the alpha_l are plain scalar matrices and each D_l is block diagonal
// with degree-at-most-1 blocks. The chain reconstructs x exactly (up to
// floating-point rounding) and carries the cost witness prod_l ||alpha_l||.

#ifndef NCFACT_FACTORIZATION_HPP
#define NCFACT_FACTORIZATION_HPP

#include <map>
#include <utility>
#include <vector>

#include "ncfact/matpoly.hpp"

namespace ncfact {

/// A square polynomial of degree <= 1 in split coefficient form:
/// a0 (x) 1 + sum_j a[j] (x) x_j + sum_j b[j] (x) x_j*.
struct DegreeOneFactor {
  Eigen::Index size = 1;
  ScalarMatrix a0;
  std::map<int, ScalarMatrix> a;  // coefficients of x_j
  std::map<int, ScalarMatrix> b;  // coefficients of x_j*

  enum class Form { type_a, type_b, mixed };

  static DegreeOneFactor unit(Eigen::Index n);
  static DegreeOneFactor zero(Eigen::Index n);
  /// Identity coefficient on a single letter.
  static DegreeOneFactor letter(Eigen::Index n, Letter l);

  /// type_a when no starred letters appear, type_b when no plain letters
  /// appear, mixed otherwise.
  Form form() const;
  bool is_unit(double tol = 1e-12) const;
  bool is_zero(double tol = 1e-12) const;
  /// a0 = a0* and b_j = a_j* for all j.
  bool self_adjoint(double tol = 1e-12) const;
  std::size_t degree() const { return (a.empty() && b.empty()) ? 0 : 1; }
  int max_generator() const;

  MatPoly to_poly() const;
};

/// An ordered list of degree-1 blocks, standing for their block-diagonal sum.
struct BlockDiagonal {
  std::vector<DegreeOneFactor> blocks;

  Eigen::Index size() const;
  MatPoly to_poly() const;
  int max_generator() const;
};

/// The alternating chain. Dimension chaining (with N_0 = N_{m+1} given by the
/// target shape): alphas[0] is out_rows x size(D_1), alphas[l] is
/// size(D_l) x size(D_{l+1}) for interior l, alphas[m] is size(D_m) x out_cols.
struct Factorization {
  Eigen::Index out_rows = 1;
  Eigen::Index out_cols = 1;
  std::vector<ScalarMatrix> alphas;  // m + 1 entries
  std::vector<BlockDiagonal> diags;  // m entries

  int length() const { return static_cast<int>(diags.size()); }
  int max_generator() const;

  /// Throws VerifyError if the dimension chaining is inconsistent.
  void validate() const;
};

/// Symbolic reconstruction of the chain product. This is the oracle every
/// rewriting step is checked against.
MatPoly expand(const Factorization& f);

/// prod_l of the exact spectral norms of the alphas; an upper-bound witness,
/// representation-independent.
double cost(const Factorization& f);

/// coeff (x) w as a chain: alpha_0 = coeff, one single-letter block per
/// letter of w, identity alphas elsewhere. The empty word gets one unit
/// block. m = max(degree, 1).
Factorization factor_monomial(const ScalarMatrix& coeff, const Word& w);

/// Appends unit diagonal factors and identity alphas until the chain has
/// length target_m. Expansion and cost are unchanged.
Factorization equalize_length(const Factorization& f, int target_m);

/// Chain for f + g: lengths equalized, alpha_0 joined horizontally, interior
/// alphas block-diagonally, diagonal factors concatenated, alpha_m stacked
/// vertically.
Factorization combine_sum(const Factorization& f, const Factorization& g);

/// Folds factor_monomial over the terms in canonical order via combine_sum.
/// expand(factor(p)) == p within reconstruction tolerance; m = max(deg, 1).
Factorization factor(const MatPoly& p);

/// Rewrites every diagonal factor as a product of factors with exactly one
/// non-unit block (padded by 1x1 unit blocks), inserting permutation
/// matrices into the alphas to move each block to the top-left corner.
/// Expansion and cost are unchanged.
Factorization single_blockify(const Factorization& f);

/// Pads every diagonal factor with zero blocks until all interior sizes are
/// equal; alphas are padded with zero rows/columns to match. alpha_0 and
/// alpha_m remain the only possibly rectangular factors.
Factorization equalize_sizes(const Factorization& f);

/// Collapses the scalars into the diagonal factors: P_1 = alpha_0 D_1 alpha_1
/// and P_l = D_l alpha_l for l >= 2. Each P_l has degree <= 1 and their
/// product equals expand(f).
std::vector<MatPoly> absorb_scalars(const Factorization& f);

/// Self-adjoint doubling (0 y; y* 0) of a degree-1 factor; same operator norm
/// as y under every representation.
DegreeOneFactor hermitize(const DegreeOneFactor& y);

/// The bracket pair (I 0) and (0; I) recovering y from its hermitization:
/// first * hermitize(y) * second == y exactly.
std::pair<ScalarMatrix, ScalarMatrix> dehermitize_bracket(Eigen::Index n);

}  // namespace ncfact

#endif  // NCFACT_FACTORIZATION_HPP
