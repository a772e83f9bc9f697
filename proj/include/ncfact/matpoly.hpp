// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_MATPOLY_HPP
#define NCFACT_MATPOLY_HPP

#include <map>

#include "ncfact/linalg.hpp"
#include "ncfact/word.hpp"

namespace ncfact {

/// Coefficients whose largest entry falls below this magnitude are dropped
/// after every arithmetic operation. Keeps cancellation from inflating the
/// support while staying far below the verification tolerances.
inline constexpr double kPruneThreshold = 1e-14;

/// A rectangular matrix-valued *-polynomial: a finite map from words in the
/// free unitary generators to complex coefficient matrices of a fixed shape.
/// Values are immutable after construction; all operations return new values.
class MatPoly {
 public:
  using TermMap = std::map<Word, ScalarMatrix>;

  /// The zero polynomial of the given shape.
  MatPoly(Eigen::Index rows, Eigen::Index cols);

  static MatPoly from_term(const Word& w, const ScalarMatrix& coeff);
  static MatPoly constant(const ScalarMatrix& coeff);
  /// I_n (x) 1, the unit of the n x n polynomial algebra.
  static MatPoly identity(Eigen::Index n);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Max degree over stored words; 0 for the zero polynomial.
  std::size_t degree() const;

  /// Largest generator index appearing in the support (0 if none).
  int max_generator() const;

  /// Coefficient of a word (zero matrix if absent).
  ScalarMatrix coeff(const Word& w) const;

  MatPoly add(const MatPoly& other) const;
  MatPoly negate() const;
  MatPoly scaled(Complex factor) const;

  /// Polynomial matrix product: coefficients multiply, words concatenate
  /// freely. No relation between x_j and x_j* is applied.
  MatPoly matmul(const MatPoly& other) const;

  /// Adjoint: transposed shape, conjugate-transposed coefficients, reversed
  /// and starred words. An involution that reverses products.
  MatPoly adjoint() const;

  /// Block-diagonal stacking, shape (rows+rows', cols+cols').
  MatPoly direct_sum(const MatPoly& other) const;

  /// left * coefficient * right applied to every term.
  MatPoly scale(const ScalarMatrix& left, const ScalarMatrix& right) const;

  double max_abs_coeff() const;

  friend MatPoly operator+(const MatPoly& a, const MatPoly& b) { return a.add(b); }
  friend MatPoly operator*(const MatPoly& a, const MatPoly& b) { return a.matmul(b); }

 private:
  void insert_pruned(const Word& w, ScalarMatrix coeff);

  Eigen::Index rows_;
  Eigen::Index cols_;
  TermMap terms_;
};

/// Largest coefficient-entry difference between two equal-shape polynomials.
double max_abs_diff(const MatPoly& p, const MatPoly& q);

}  // namespace ncfact

#endif  // NCFACT_MATPOLY_HPP
