// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/factorization.hpp"

#include <algorithm>
#include <string>

#include "ncfact/errors.hpp"

namespace ncfact {

namespace {

ScalarMatrix padded(const ScalarMatrix& m, Eigen::Index rows, Eigen::Index cols) {
  ScalarMatrix out = ScalarMatrix::Zero(rows, cols);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

void check_square_coeff(const ScalarMatrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw InputError(std::string("degree-one factor ") + what + " coefficient has shape " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     ", expected " + std::to_string(n) + "x" + std::to_string(n));
  }
}

}  // namespace

DegreeOneFactor DegreeOneFactor::unit(Eigen::Index n) {
  DegreeOneFactor y;
  y.size = n;
  y.a0 = ScalarMatrix::Identity(n, n);
  return y;
}

DegreeOneFactor DegreeOneFactor::zero(Eigen::Index n) {
  DegreeOneFactor y;
  y.size = n;
  y.a0 = ScalarMatrix::Zero(n, n);
  return y;
}

DegreeOneFactor DegreeOneFactor::letter(Eigen::Index n, Letter l) {
  DegreeOneFactor y;
  y.size = n;
  y.a0 = ScalarMatrix::Zero(n, n);
  if (l.starred) {
    y.b[l.gen_index] = ScalarMatrix::Identity(n, n);
  } else {
    y.a[l.gen_index] = ScalarMatrix::Identity(n, n);
  }
  return y;
}

DegreeOneFactor::Form DegreeOneFactor::form() const {
  if (!a.empty() && !b.empty()) return Form::mixed;
  if (!a.empty()) return Form::type_a;
  if (!b.empty()) return Form::type_b;
  return Form::type_a;
}

bool DegreeOneFactor::is_unit(double tol) const {
  if (!a.empty() || !b.empty()) return false;
  return max_abs(ScalarMatrix(a0 - ScalarMatrix::Identity(size, size))) <= tol;
}

bool DegreeOneFactor::is_zero(double tol) const {
  if (max_abs(a0) > tol) return false;
  for (const auto& [j, c] : a) {
    if (max_abs(c) > tol) return false;
  }
  for (const auto& [j, c] : b) {
    if (max_abs(c) > tol) return false;
  }
  return true;
}

bool DegreeOneFactor::self_adjoint(double tol) const {
  if (max_abs(ScalarMatrix(a0 - a0.adjoint())) > tol) return false;
  if (a.size() != b.size()) return false;
  for (const auto& [j, aj] : a) {
    auto it = b.find(j);
    if (it == b.end()) return false;
    if (max_abs(ScalarMatrix(it->second - aj.adjoint())) > tol) return false;
  }
  return true;
}

int DegreeOneFactor::max_generator() const {
  int m = 0;
  if (!a.empty()) m = std::max(m, a.rbegin()->first);
  if (!b.empty()) m = std::max(m, b.rbegin()->first);
  return m;
}

MatPoly DegreeOneFactor::to_poly() const {
  check_square_coeff(a0, size, "a0");
  MatPoly p = MatPoly::constant(a0);
  for (const auto& [j, c] : a) {
    check_square_coeff(c, size, "a_j");
    p = p.add(MatPoly::from_term(Word({Letter{j, false}}), c));
  }
  for (const auto& [j, c] : b) {
    check_square_coeff(c, size, "b_j");
    p = p.add(MatPoly::from_term(Word({Letter{j, true}}), c));
  }
  return p;
}

Eigen::Index BlockDiagonal::size() const {
  Eigen::Index n = 0;
  for (const auto& blk : blocks) n += blk.size;
  return n;
}

MatPoly BlockDiagonal::to_poly() const {
  if (blocks.empty()) throw InputError("block diagonal factor with no blocks");
  MatPoly p = blocks.front().to_poly();
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    p = p.direct_sum(blocks[k].to_poly());
  }
  return p;
}

int BlockDiagonal::max_generator() const {
  int m = 0;
  for (const auto& blk : blocks) m = std::max(m, blk.max_generator());
  return m;
}

int Factorization::max_generator() const {
  int m = 0;
  for (const auto& d : diags) m = std::max(m, d.max_generator());
  return m;
}

void Factorization::validate() const {
  if (diags.empty() || alphas.size() != diags.size() + 1) {
    throw VerifyError("factorization must have m >= 1 diagonal factors and m+1 alphas");
  }
  if (alphas.front().rows() != out_rows) {
    throw VerifyError("alpha_0 row count does not match the target shape");
  }
  if (alphas.back().cols() != out_cols) {
    throw VerifyError("alpha_m column count does not match the target shape");
  }
  for (std::size_t l = 0; l < diags.size(); ++l) {
    const Eigen::Index n = diags[l].size();
    if (alphas[l].cols() != n) {
      throw VerifyError("alpha_" + std::to_string(l) + " columns do not match D_" +
                        std::to_string(l + 1) + " size");
    }
    if (alphas[l + 1].rows() != n) {
      throw VerifyError("alpha_" + std::to_string(l + 1) + " rows do not match D_" +
                        std::to_string(l + 1) + " size");
    }
  }
}

MatPoly expand(const Factorization& f) {
  f.validate();
  MatPoly acc = MatPoly::constant(f.alphas[0]);
  for (std::size_t l = 0; l < f.diags.size(); ++l) {
    acc = acc.matmul(f.diags[l].to_poly());
    acc = acc.matmul(MatPoly::constant(f.alphas[l + 1]));
  }
  return acc;
}

double cost(const Factorization& f) {
  double c = 1.0;
  for (const auto& alpha : f.alphas) c *= spectral_norm_svd(alpha);
  return c;
}

Factorization factor_monomial(const ScalarMatrix& coeff, const Word& w) {
  Factorization f;
  f.out_rows = coeff.rows();
  f.out_cols = coeff.cols();
  const Eigen::Index n = coeff.cols();
  f.alphas.push_back(coeff);
  if (w.is_unit()) {
    f.diags.push_back(BlockDiagonal{{DegreeOneFactor::unit(n)}});
    f.alphas.push_back(ScalarMatrix::Identity(n, n));
    return f;
  }
  for (const auto& l : w.letters()) {
    f.diags.push_back(BlockDiagonal{{DegreeOneFactor::letter(n, l)}});
    f.alphas.push_back(ScalarMatrix::Identity(n, n));
  }
  return f;
}

Factorization equalize_length(const Factorization& f, int target_m) {
  if (target_m < f.length()) {
    throw InputError("cannot shorten a factorization: length " +
                     std::to_string(f.length()) + ", requested " + std::to_string(target_m));
  }
  Factorization out = f;
  const Eigen::Index n = out.out_cols;
  while (out.length() < target_m) {
    out.diags.push_back(BlockDiagonal{{DegreeOneFactor::unit(n)}});
    out.alphas.push_back(ScalarMatrix::Identity(n, n));
  }
  return out;
}

Factorization combine_sum(const Factorization& f, const Factorization& g) {
  if (f.out_rows != g.out_rows || f.out_cols != g.out_cols) {
    throw InputError("combine_sum requires identical output shapes");
  }
  const int m = std::max(f.length(), g.length());
  Factorization a = equalize_length(f, m);
  Factorization b = equalize_length(g, m);

  Factorization out;
  out.out_rows = f.out_rows;
  out.out_cols = f.out_cols;

  // alpha_0: horizontal join.
  ScalarMatrix head(out.out_rows, a.alphas[0].cols() + b.alphas[0].cols());
  head << a.alphas[0], b.alphas[0];
  out.alphas.push_back(std::move(head));

  for (int l = 0; l < m; ++l) {
    BlockDiagonal d = a.diags[l];
    d.blocks.insert(d.blocks.end(), b.diags[l].blocks.begin(), b.diags[l].blocks.end());
    out.diags.push_back(std::move(d));

    if (l + 1 < m) {
      const auto& af = a.alphas[l + 1];
      const auto& bg = b.alphas[l + 1];
      ScalarMatrix mid = ScalarMatrix::Zero(af.rows() + bg.rows(), af.cols() + bg.cols());
      mid.topLeftCorner(af.rows(), af.cols()) = af;
      mid.bottomRightCorner(bg.rows(), bg.cols()) = bg;
      out.alphas.push_back(std::move(mid));
    }
  }

  // alpha_m: vertical join.
  ScalarMatrix tail(a.alphas[m].rows() + b.alphas[m].rows(), out.out_cols);
  tail << a.alphas[m], b.alphas[m];
  out.alphas.push_back(std::move(tail));
  return out;
}

Factorization factor(const MatPoly& p) {
  if (p.is_zero()) {
    Factorization f;
    f.out_rows = p.rows();
    f.out_cols = p.cols();
    f.alphas.push_back(ScalarMatrix::Zero(p.rows(), p.cols()));
    f.diags.push_back(BlockDiagonal{{DegreeOneFactor::unit(p.cols())}});
    f.alphas.push_back(ScalarMatrix::Identity(p.cols(), p.cols()));
    return f;
  }
  bool first = true;
  Factorization acc;
  for (const auto& [w, c] : p.terms()) {
    Factorization piece = factor_monomial(c, w);
    acc = first ? std::move(piece) : combine_sum(acc, piece);
    first = false;
  }
  return acc;
}

namespace {

/// Permutation matrix moving rows [offset, offset + len) to the top.
ScalarMatrix front_permutation(Eigen::Index n, Eigen::Index offset, Eigen::Index len) {
  ScalarMatrix p = ScalarMatrix::Zero(n, n);
  Eigen::Index row = 0;
  for (Eigen::Index i = offset; i < offset + len; ++i) p(row++, i) = 1.0;
  for (Eigen::Index i = 0; i < offset; ++i) p(row++, i) = 1.0;
  for (Eigen::Index i = offset + len; i < n; ++i) p(row++, i) = 1.0;
  return p;
}

BlockDiagonal with_unit_padding(const DegreeOneFactor& blk, Eigen::Index pad) {
  BlockDiagonal d;
  d.blocks.push_back(blk);
  for (Eigen::Index i = 0; i < pad; ++i) d.blocks.push_back(DegreeOneFactor::unit(1));
  return d;
}

}  // namespace

Factorization single_blockify(const Factorization& f) {
  f.validate();
  Factorization out;
  out.out_rows = f.out_rows;
  out.out_cols = f.out_cols;
  out.alphas.push_back(f.alphas[0]);

  for (std::size_t l = 0; l < f.diags.size(); ++l) {
    const BlockDiagonal& d = f.diags[l];
    const Eigen::Index n = d.size();

    std::vector<std::pair<Eigen::Index, const DegreeOneFactor*>> non_unit;
    Eigen::Index offset = 0;
    for (const auto& blk : d.blocks) {
      if (!blk.is_unit()) non_unit.emplace_back(offset, &blk);
      offset += blk.size;
    }

    if (d.blocks.size() <= 1 || non_unit.size() <= 1) {
      // Already a single block (or a single non-unit one); conjugate the
      // non-unit block to the front only when there is rearranging to do.
      if (d.blocks.size() <= 1 || non_unit.empty()) {
        out.diags.push_back(d);
        out.alphas.push_back(f.alphas[l + 1]);
        continue;
      }
      ScalarMatrix pi = front_permutation(n, non_unit[0].first, non_unit[0].second->size);
      out.alphas.back() = out.alphas.back() * pi.adjoint();
      out.diags.push_back(with_unit_padding(*non_unit[0].second, n - non_unit[0].second->size));
      out.alphas.push_back(pi * f.alphas[l + 1]);
      continue;
    }

    // D = E_1 E_2 ... E_k with E_i = diag(..., y_i, ...); conjugate each E_i
    // so its non-unit block leads, then absorb the permutations into alphas.
    ScalarMatrix prev = ScalarMatrix::Identity(n, n);
    for (std::size_t k = 0; k < non_unit.size(); ++k) {
      ScalarMatrix pi = front_permutation(n, non_unit[k].first, non_unit[k].second->size);
      out.alphas.back() = out.alphas.back() * (prev * pi.adjoint());
      out.diags.push_back(with_unit_padding(*non_unit[k].second, n - non_unit[k].second->size));
      out.alphas.push_back(ScalarMatrix::Identity(n, n));
      prev = pi;
    }
    out.alphas.back() = prev * f.alphas[l + 1];
  }
  // The loop may leave the last alpha multiplied on the left only; shape is
  // already correct by construction.
  out.validate();
  return out;
}

Factorization equalize_sizes(const Factorization& f) {
  f.validate();
  Eigen::Index target = 0;
  for (const auto& d : f.diags) target = std::max(target, d.size());

  Factorization out = f;
  for (std::size_t l = 0; l < out.diags.size(); ++l) {
    const Eigen::Index pad = target - out.diags[l].size();
    if (pad == 0) continue;
    out.diags[l].blocks.push_back(DegreeOneFactor::zero(pad));
    // Zero columns on the alpha feeding this factor, zero rows on the one
    // consuming it; the spectral norms are unchanged.
    out.alphas[l] = padded(out.alphas[l], out.alphas[l].rows(), target);
    out.alphas[l + 1] = padded(out.alphas[l + 1], target, out.alphas[l + 1].cols());
  }
  out.validate();
  return out;
}

std::vector<MatPoly> absorb_scalars(const Factorization& f) {
  f.validate();
  std::vector<MatPoly> chain;
  chain.reserve(f.diags.size());
  MatPoly first = MatPoly::constant(f.alphas[0])
                      .matmul(f.diags[0].to_poly())
                      .matmul(MatPoly::constant(f.alphas[1]));
  chain.push_back(std::move(first));
  for (std::size_t l = 1; l < f.diags.size(); ++l) {
    chain.push_back(f.diags[l].to_poly().matmul(MatPoly::constant(f.alphas[l + 1])));
  }
  return chain;
}

DegreeOneFactor hermitize(const DegreeOneFactor& y) {
  const Eigen::Index n = y.size;
  DegreeOneFactor h;
  h.size = 2 * n;

  auto corner = [n](const ScalarMatrix& top_right, const ScalarMatrix& bottom_left) {
    ScalarMatrix m = ScalarMatrix::Zero(2 * n, 2 * n);
    m.topRightCorner(n, n) = top_right;
    m.bottomLeftCorner(n, n) = bottom_left;
    return m;
  };

  h.a0 = corner(y.a0, y.a0.adjoint());
  // y* contributes a_j* on x_j* and b_j* on x_j.
  for (const auto& [j, aj] : y.a) {
    h.a[j] = corner(aj, ScalarMatrix::Zero(n, n));
    h.b[j] = corner(ScalarMatrix::Zero(n, n), aj.adjoint());
  }
  for (const auto& [j, bj] : y.b) {
    auto ita = h.a.find(j);
    if (ita == h.a.end()) {
      h.a[j] = corner(ScalarMatrix::Zero(n, n), bj.adjoint());
    } else {
      ita->second.bottomLeftCorner(n, n) = bj.adjoint();
    }
    auto itb = h.b.find(j);
    if (itb == h.b.end()) {
      h.b[j] = corner(bj, ScalarMatrix::Zero(n, n));
    } else {
      itb->second.topRightCorner(n, n) = bj;
    }
  }
  return h;
}

std::pair<ScalarMatrix, ScalarMatrix> dehermitize_bracket(Eigen::Index n) {
  ScalarMatrix left = ScalarMatrix::Zero(n, 2 * n);
  left.leftCols(n) = ScalarMatrix::Identity(n, n);
  ScalarMatrix right = ScalarMatrix::Zero(2 * n, n);
  right.bottomRows(n) = ScalarMatrix::Identity(n, n);
  return {left, right};
}

}  // namespace ncfact
