// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/matpoly.hpp"

#include <string>

#include "ncfact/errors.hpp"

namespace ncfact {

namespace {

std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

MatPoly::MatPoly(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw InputError("polynomial shape must be positive, got " + shape_str(rows, cols));
  }
}

MatPoly MatPoly::from_term(const Word& w, const ScalarMatrix& coeff) {
  MatPoly p(coeff.rows(), coeff.cols());
  p.insert_pruned(w, coeff);
  return p;
}

MatPoly MatPoly::constant(const ScalarMatrix& coeff) {
  return from_term(Word::unit(), coeff);
}

MatPoly MatPoly::identity(Eigen::Index n) {
  return constant(ScalarMatrix::Identity(n, n));
}

std::size_t MatPoly::degree() const {
  std::size_t d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, w.degree());
  return d;
}

int MatPoly::max_generator() const {
  int m = 0;
  for (const auto& [w, c] : terms_) m = std::max(m, w.max_generator());
  return m;
}

ScalarMatrix MatPoly::coeff(const Word& w) const {
  auto it = terms_.find(w);
  if (it == terms_.end()) return ScalarMatrix::Zero(rows_, cols_);
  return it->second;
}

void MatPoly::insert_pruned(const Word& w, ScalarMatrix coeff) {
  if (coeff.rows() != rows_ || coeff.cols() != cols_) {
    throw InputError("coefficient shape " + shape_str(coeff.rows(), coeff.cols()) +
                     " does not match polynomial shape " + shape_str(rows_, cols_));
  }
  if (max_abs(coeff) < kPruneThreshold) return;
  terms_.emplace(w, std::move(coeff));
}

MatPoly MatPoly::add(const MatPoly& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw InputError("shape mismatch in add: " + shape_str(rows_, cols_) + " vs " +
                     shape_str(other.rows_, other.cols_));
  }
  MatPoly out(rows_, cols_);
  auto it = terms_.begin();
  auto jt = other.terms_.begin();
  while (it != terms_.end() || jt != other.terms_.end()) {
    if (jt == other.terms_.end() || (it != terms_.end() && it->first < jt->first)) {
      out.insert_pruned(it->first, it->second);
      ++it;
    } else if (it == terms_.end() || jt->first < it->first) {
      out.insert_pruned(jt->first, jt->second);
      ++jt;
    } else {
      out.insert_pruned(it->first, it->second + jt->second);
      ++it;
      ++jt;
    }
  }
  return out;
}

MatPoly MatPoly::negate() const { return scaled(Complex(-1.0, 0.0)); }

MatPoly MatPoly::scaled(Complex factor) const {
  MatPoly out(rows_, cols_);
  for (const auto& [w, c] : terms_) out.insert_pruned(w, factor * c);
  return out;
}

MatPoly MatPoly::matmul(const MatPoly& other) const {
  if (cols_ != other.rows_) {
    throw InputError("inner dimension mismatch in matmul: " + shape_str(rows_, cols_) +
                     " * " + shape_str(other.rows_, other.cols_));
  }
  std::map<Word, ScalarMatrix> acc;
  for (const auto& [v, a] : terms_) {
    for (const auto& [w, b] : other.terms_) {
      Word vw = v.concat(w);
      auto [it, inserted] = acc.emplace(vw, a * b);
      if (!inserted) it->second += a * b;
    }
  }
  MatPoly out(rows_, other.cols_);
  for (auto& [w, c] : acc) out.insert_pruned(w, std::move(c));
  return out;
}

MatPoly MatPoly::adjoint() const {
  MatPoly out(cols_, rows_);
  for (const auto& [w, c] : terms_) out.insert_pruned(w.star(), c.adjoint());
  return out;
}

MatPoly MatPoly::direct_sum(const MatPoly& other) const {
  MatPoly out(rows_ + other.rows_, cols_ + other.cols_);
  auto padded = [&](const ScalarMatrix* top, const ScalarMatrix* bottom) {
    ScalarMatrix m = ScalarMatrix::Zero(out.rows_, out.cols_);
    if (top) m.topLeftCorner(rows_, cols_) = *top;
    if (bottom) m.bottomRightCorner(other.rows_, other.cols_) = *bottom;
    return m;
  };
  for (const auto& [w, c] : terms_) {
    auto jt = other.terms_.find(w);
    out.insert_pruned(w, padded(&c, jt == other.terms_.end() ? nullptr : &jt->second));
  }
  for (const auto& [w, c] : other.terms_) {
    if (terms_.count(w) == 0) out.insert_pruned(w, padded(nullptr, &c));
  }
  return out;
}

MatPoly MatPoly::scale(const ScalarMatrix& left, const ScalarMatrix& right) const {
  if (left.cols() != rows_ || cols_ != right.rows()) {
    throw InputError("dimension mismatch in scale: " + shape_str(left.rows(), left.cols()) +
                     " * " + shape_str(rows_, cols_) + " * " +
                     shape_str(right.rows(), right.cols()));
  }
  MatPoly out(left.rows(), right.cols());
  for (const auto& [w, c] : terms_) out.insert_pruned(w, left * c * right);
  return out;
}

double MatPoly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [w, c] : terms_) m = std::max(m, max_abs(c));
  return m;
}

double max_abs_diff(const MatPoly& p, const MatPoly& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw InputError("shape mismatch in max_abs_diff");
  }
  return p.add(q.negate()).max_abs_coeff();
}

}  // namespace ncfact
