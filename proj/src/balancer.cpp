// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/balancer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncfact/errors.hpp"
#include "ncfact/format.hpp"
#include "ncfact/parallel.hpp"

namespace ncfact {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kBetaMin = 1e-8;
constexpr double kBetaMax = 1e8;

struct CoeffScan {
  const ScalarMatrix* single = nullptr;
  int count = 0;
};

/// Finds the nonzero coefficient matrices; a block with at most one evaluates
/// to coeff (x) unitary, whose norm is ||coeff|| exactly.
CoeffScan scan_coefficients(const DegreeOneFactor& y) {
  CoeffScan scan;
  auto visit = [&scan](const ScalarMatrix& c) {
    if (max_abs(c) > 0.0) {
      scan.single = &c;
      ++scan.count;
    }
  };
  visit(y.a0);
  for (const auto& [j, c] : y.a) visit(c);
  for (const auto& [j, c] : y.b) visit(c);
  return scan;
}

void scale_block(DegreeOneFactor& y, double s) {
  y.a0 *= s;
  for (auto& [j, c] : y.a) c *= s;
  for (auto& [j, c] : y.b) c *= s;
}

void scale_block_row(DegreeOneFactor& y, Eigen::Index r, double s) {
  y.a0.row(r) *= s;
  for (auto& [j, c] : y.a) c.row(r) *= s;
  for (auto& [j, c] : y.b) c.row(r) *= s;
}

void scale_block_col(DegreeOneFactor& y, Eigen::Index c0, double s) {
  y.a0.col(c0) *= s;
  for (auto& [j, c] : y.a) c.col(c0) *= s;
  for (auto& [j, c] : y.b) c.col(c0) *= s;
}

double block_frobenius_row_sq(const DegreeOneFactor& y, Eigen::Index r) {
  double acc = y.a0.row(r).squaredNorm();
  for (const auto& [j, c] : y.a) acc += c.row(r).squaredNorm();
  for (const auto& [j, c] : y.b) acc += c.row(r).squaredNorm();
  return acc;
}

double block_frobenius_col_sq(const DegreeOneFactor& y, Eigen::Index c0) {
  double acc = y.a0.col(c0).squaredNorm();
  for (const auto& [j, c] : y.a) acc += c.col(c0).squaredNorm();
  for (const auto& [j, c] : y.b) acc += c.col(c0).squaredNorm();
  return acc;
}

}  // namespace

NormProxy::NormProxy(Representation rep) { reps_.push_back(std::move(rep)); }

NormProxy::NormProxy(const EnsembleSpec& spec, int threads) {
  reps_.resize(static_cast<std::size_t>(spec.samples));
  parallel_for(reps_.size(), threads, [&](std::size_t i) {
    reps_[i] = sample_representation(spec, static_cast<int>(i));
  });
}

double NormProxy::poly_norm(const MatPoly& p) const {
  // A single term c (x) w evaluates to kron(c, unitary); its norm is ||c||
  // under every representation.
  if (p.is_zero()) return 0.0;
  if (p.term_count() == 1) return spectral_norm_svd(p.terms().begin()->second);
  double best = 0.0;
  for (const auto& rep : reps_) {
    best = std::max(best, operator_norm(eval(p, rep)).value);
  }
  return best;
}

double NormProxy::block_norm(const DegreeOneFactor& y) const {
  const CoeffScan scan = scan_coefficients(y);
  if (scan.count == 0) return 0.0;
  if (scan.count == 1) return spectral_norm_svd(*scan.single);
  return poly_norm(y.to_poly());
}

double NormProxy::diag_norm(const BlockDiagonal& d) const {
  double best = 0.0;
  for (const auto& blk : d.blocks) best = std::max(best, block_norm(blk));
  return best;
}

namespace {

NormProxy make_proxy(const BalanceConfig& cfg) {
  if (cfg.representation.has_value()) return NormProxy(*cfg.representation);
  if (cfg.ensemble.has_value()) return NormProxy(*cfg.ensemble, cfg.threads);
  throw InputError("balance config needs a representation or an ensemble reference");
}

void rescale_blocks_inplace(Factorization& f, const NormProxy& proxy,
                            std::vector<std::vector<double>>* block_norms_out) {
  f.validate();
  if (block_norms_out) block_norms_out->assign(f.diags.size(), {});
  for (std::size_t i = 0; i < f.diags.size(); ++i) {
    std::vector<double> norms;
    norms.reserve(f.diags[i].blocks.size());
    double s = 0.0;
    for (const auto& blk : f.diags[i].blocks) {
      norms.push_back(proxy.block_norm(blk));
      s = std::max(s, norms.back());
    }
    if (s < kTiny) {
      throw InputError("zero-norm diagonal factor at position " + std::to_string(i + 1));
    }
    for (auto& blk : f.diags[i].blocks) scale_block(blk, 1.0 / s);
    for (auto& v : norms) v /= s;
    f.alphas[i + 1] *= s;
    if (block_norms_out) (*block_norms_out)[i] = std::move(norms);
  }
  // Geometric equalization: t_l = G / ||alpha_l|| with prod t_l = 1 leaves
  // both the expansion and the cost unchanged.
  std::vector<double> anorms;
  anorms.reserve(f.alphas.size());
  double log_sum = 0.0;
  for (const auto& alpha : f.alphas) {
    double n = spectral_norm_svd(alpha);
    if (n < kTiny) return;  // degenerate chain (zero polynomial); nothing to equalize
    anorms.push_back(n);
    log_sum += std::log(n);
  }
  const double log_g = log_sum / static_cast<double>(f.alphas.size());
  for (std::size_t l = 0; l < f.alphas.size(); ++l) {
    f.alphas[l] *= std::exp(log_g - std::log(anorms[l]));
  }
}

struct DescentState {
  Factorization work;
  std::vector<std::vector<double>> block_norms;  // per diag, per block
  std::vector<double> alpha_norms;

  double log_cost() const {
    double acc = 0.0;
    for (double n : alpha_norms) acc += std::log(std::max(n, kTiny));
    return acc;
  }
  double cost_value() const {
    double acc = 1.0;
    for (double n : alpha_norms) acc *= n;
    return acc;
  }
};

/// Offsets of each block inside its diagonal factor.
std::vector<Eigen::Index> block_offsets(const BlockDiagonal& d) {
  std::vector<Eigen::Index> offs;
  offs.reserve(d.blocks.size());
  Eigen::Index acc = 0;
  for (const auto& blk : d.blocks) {
    offs.push_back(acc);
    acc += blk.size;
  }
  return offs;
}

/// Applies the similarity insertion at one edge of diagonal factor i.
/// left: alphas[i] -> alphas[i] * beta, D rows scaled by 1/beta.
/// right: D columns scaled by beta, alphas[i+1] -> beta^-1 * alphas[i+1].
/// The diagonal factor is then renormalized to proxy norm 1, with the scalar
/// folded into alphas[i+1]. Returns false if the move is degenerate.
bool try_edge_move(DescentState& st, const NormProxy& proxy, std::size_t i, bool left,
                   const std::vector<double>& beta, double accept_margin) {
  Factorization& f = st.work;
  BlockDiagonal& d = f.diags[i];
  const auto offs = block_offsets(d);
  const Eigen::Index n = d.size();
  if (static_cast<Eigen::Index>(beta.size()) != n) return false;

  for (double b : beta) {
    if (!(b >= kBetaMin && b <= kBetaMax)) return false;
  }

  // Work out which blocks change.
  std::vector<bool> touched(d.blocks.size(), false);
  for (std::size_t k = 0; k < d.blocks.size(); ++k) {
    for (Eigen::Index p = offs[k]; p < offs[k] + d.blocks[k].size; ++p) {
      if (beta[static_cast<std::size_t>(p)] != 1.0) {
        touched[k] = true;
        break;
      }
    }
  }

  std::vector<DegreeOneFactor> new_blocks;
  std::vector<double> new_norms = st.block_norms[i];
  new_blocks.reserve(d.blocks.size());
  for (std::size_t k = 0; k < d.blocks.size(); ++k) {
    DegreeOneFactor blk = d.blocks[k];
    if (touched[k]) {
      for (Eigen::Index p = offs[k]; p < offs[k] + blk.size; ++p) {
        const double b = beta[static_cast<std::size_t>(p)];
        if (b == 1.0) continue;
        if (left) {
          scale_block_row(blk, p - offs[k], 1.0 / b);
        } else {
          scale_block_col(blk, p - offs[k], b);
        }
      }
      new_norms[k] = proxy.block_norm(blk);
    }
    new_blocks.push_back(std::move(blk));
  }
  double s = 0.0;
  for (double v : new_norms) s = std::max(s, v);
  if (s < kTiny || !std::isfinite(s)) return false;

  ScalarMatrix new_alpha_a;  // alphas[i]
  ScalarMatrix new_alpha_b;  // alphas[i+1]
  double norm_a, norm_b;
  if (left) {
    new_alpha_a = f.alphas[i];
    for (Eigen::Index p = 0; p < n; ++p) new_alpha_a.col(p) *= beta[static_cast<std::size_t>(p)];
    norm_a = spectral_norm_svd(new_alpha_a);
    new_alpha_b = f.alphas[i + 1] * s;
    norm_b = st.alpha_norms[i + 1] * s;
  } else {
    new_alpha_a = f.alphas[i];
    norm_a = st.alpha_norms[i];
    new_alpha_b = f.alphas[i + 1];
    for (Eigen::Index p = 0; p < n; ++p) new_alpha_b.row(p) /= beta[static_cast<std::size_t>(p)];
    new_alpha_b *= s;
    norm_b = spectral_norm_svd(new_alpha_b);
  }
  if (!std::isfinite(norm_a) || !std::isfinite(norm_b)) return false;

  const double old_log = std::log(std::max(st.alpha_norms[i], kTiny)) +
                         std::log(std::max(st.alpha_norms[i + 1], kTiny));
  const double new_log =
      std::log(std::max(norm_a, kTiny)) + std::log(std::max(norm_b, kTiny));
  if (!(new_log < old_log - accept_margin)) return false;

  // Accept: fold the renormalization into the blocks and commit.
  for (std::size_t k = 0; k < new_blocks.size(); ++k) {
    scale_block(new_blocks[k], 1.0 / s);
    new_norms[k] /= s;
  }
  d.blocks = std::move(new_blocks);
  st.block_norms[i] = std::move(new_norms);
  f.alphas[i] = std::move(new_alpha_a);
  f.alphas[i + 1] = std::move(new_alpha_b);
  st.alpha_norms[i] = norm_a;
  st.alpha_norms[i + 1] = norm_b;
  return true;
}

/// Closed-form proposal balancing the Frobenius weight carried by each
/// diagonal position across the edge.
std::vector<double> frobenius_beta(const DescentState& st, std::size_t i, bool left) {
  const Factorization& f = st.work;
  const BlockDiagonal& d = f.diags[i];
  const auto offs = block_offsets(d);
  const Eigen::Index n = d.size();
  std::vector<double> beta(static_cast<std::size_t>(n), 1.0);
  for (std::size_t k = 0; k < d.blocks.size(); ++k) {
    for (Eigen::Index p = offs[k]; p < offs[k] + d.blocks[k].size; ++p) {
      double alpha_w, diag_w;
      if (left) {
        alpha_w = f.alphas[i].col(p).squaredNorm();
        diag_w = block_frobenius_row_sq(d.blocks[k], p - offs[k]);
      } else {
        diag_w = block_frobenius_col_sq(d.blocks[k], p - offs[k]);
        alpha_w = f.alphas[i + 1].row(p).squaredNorm();
      }
      if (alpha_w < kTiny || diag_w < kTiny) continue;
      const double b = left ? std::pow(diag_w / alpha_w, 0.25)
                            : std::pow(alpha_w / diag_w, 0.25);
      beta[static_cast<std::size_t>(p)] = std::clamp(b, kBetaMin, kBetaMax);
    }
  }
  return beta;
}

}  // namespace

Factorization rescale_blocks(const Factorization& f, const BalanceConfig& cfg) {
  NormProxy proxy = make_proxy(cfg);
  Factorization out = f;
  rescale_blocks_inplace(out, proxy, nullptr);
  return out;
}

std::pair<Factorization, BalanceReport> similarity_descent(const Factorization& f,
                                                           const BalanceConfig& cfg) {
  if (cfg.max_rounds < 1) throw InputError("max_rounds must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw InputError("tolerance must be positive");
  NormProxy proxy = make_proxy(cfg);

  const MatPoly reference = expand(f);
  const double ref_scale = std::max(1.0, reference.max_abs_coeff());

  DescentState st;
  st.work = f;
  rescale_blocks_inplace(st.work, proxy, &st.block_norms);
  st.alpha_norms.clear();
  for (const auto& alpha : st.work.alphas) st.alpha_norms.push_back(spectral_norm_svd(alpha));

  BalanceReport report;
  report.m = st.work.length();
  report.initial_cost = st.cost_value();
  report.round_costs.push_back(report.initial_cost);

  const bool degenerate =
      std::any_of(st.alpha_norms.begin(), st.alpha_norms.end(), [](double n) { return n < kTiny; });

  if (!degenerate) {
    double prev_cost = report.initial_cost;
    for (int round = 0; round < cfg.max_rounds; ++round) {
      const double gamma = 1.0 + std::pow(2.0, -round);
      for (std::size_t i = 0; i < st.work.diags.size(); ++i) {
        for (bool left : {true, false}) {
          try_edge_move(st, proxy, i, left, frobenius_beta(st, i, left), 0.0);
        }
      }
      for (std::size_t i = 0; i < st.work.diags.size(); ++i) {
        const Eigen::Index n = st.work.diags[i].size();
        for (bool left : {true, false}) {
          for (Eigen::Index p = 0; p < n; ++p) {
            for (double b : {gamma, 1.0 / gamma}) {
              std::vector<double> beta(static_cast<std::size_t>(n), 1.0);
              beta[static_cast<std::size_t>(p)] = b;
              if (try_edge_move(st, proxy, i, left, beta, 0.0)) break;
            }
          }
        }
      }
      const double now = st.cost_value();
      report.round_costs.push_back(now);
      if (max_abs_diff(expand(st.work), reference) > 1e-9 * ref_scale) {
        throw VerifyError("similarity descent drifted from the reference expansion");
      }
      if (prev_cost - now < cfg.tolerance) break;
      prev_cost = now;
    }
  }

  report.final_cost = st.cost_value();
  const double target_norm = proxy.poly_norm(reference);
  report.achieved_epsilon =
      target_norm > kTiny ? report.final_cost / target_norm - 1.0 : 0.0;
  return {std::move(st.work), std::move(report)};
}

std::pair<Factorization, BalanceReport> balance(const Factorization& f,
                                                const BalanceConfig& cfg) {
  if (cfg.similarity_search) return similarity_descent(f, cfg);
  NormProxy proxy = make_proxy(cfg);
  Factorization out = f;
  rescale_blocks_inplace(out, proxy, nullptr);
  BalanceReport report;
  report.m = out.length();
  report.initial_cost = cost(out);
  report.final_cost = report.initial_cost;
  report.round_costs = {report.initial_cost};
  const MatPoly reference = expand(out);
  const double target_norm = proxy.poly_norm(reference);
  report.achieved_epsilon =
      target_norm > kTiny ? report.final_cost / target_norm - 1.0 : 0.0;
  return {std::move(out), std::move(report)};
}

Factorization equalize_factor_norms(const Factorization& f, const NormProxy& proxy) {
  f.validate();
  const int m = f.length();
  if (m < 1) return f;
  std::vector<MatPoly> chain = absorb_scalars(f);
  std::vector<double> norms;
  norms.reserve(chain.size());
  double log_sum = 0.0;
  for (const auto& p : chain) {
    double n = proxy.poly_norm(p);
    if (n < kTiny) return f;  // a zero factor cannot be rescaled into balance
    norms.push_back(n);
    log_sum += std::log(n);
  }
  const double log_g = log_sum / static_cast<double>(m);
  Factorization out = f;
  for (int l = 1; l <= m; ++l) {
    out.alphas[static_cast<std::size_t>(l)] *= std::exp(log_g - std::log(norms[l - 1]));
  }
  return out;
}

MatPoly random_poly(RandomStream& stream, int rows, int cols, int max_degree,
                    int gen_count, int max_terms, bool unit_grid) {
  const int nterms = 1 + static_cast<int>(stream.uniform_below(
                             static_cast<std::uint64_t>(std::max(1, max_terms))));
  MatPoly p(rows, cols);
  for (int t = 0; t < nterms; ++t) {
    const auto len = stream.uniform_below(static_cast<std::uint64_t>(max_degree) + 1);
    std::vector<Letter> letters;
    for (std::uint64_t i = 0; i < len; ++i) {
      const int gen = 1 + static_cast<int>(stream.uniform_below(
                              static_cast<std::uint64_t>(gen_count)));
      const bool starred = stream.uniform_below(2) == 1;
      letters.push_back(Letter{gen, starred});
    }
    ScalarMatrix c(rows, cols);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      for (Eigen::Index j = 0; j < c.cols(); ++j) {
        if (unit_grid) {
          const double re = static_cast<double>(stream.uniform_below(3)) - 1.0;
          const double im = static_cast<double>(stream.uniform_below(3)) - 1.0;
          c(i, j) = Complex(re, im);
        } else {
          c(i, j) = stream.complex_normal();
        }
      }
    }
    p = p.add(MatPoly::from_term(Word(std::move(letters)), c));
  }
  return p;
}

std::vector<ProbeRow> probe_m(int d, int n, double eps, std::uint64_t corpus_seed,
                              int count, const EnsembleSpec& reference, int threads,
                              int max_rounds, double tolerance) {
  if (d < 1 || n < 1) throw InputError("probe requires d >= 1 and n >= 1");
  if (!(eps > 0.0)) throw InputError("probe requires eps > 0");
  if (count < 1) throw InputError("probe requires count >= 1");

  std::vector<ProbeRow> rows(static_cast<std::size_t>(count));
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    RandomStream stream(corpus_seed, i);
    NormProxy proxy(reference);
    MatPoly p(n, n);
    double norm = 0.0;
    do {
      p = random_poly(stream, n, n, d, reference.gen_count, std::max(2, 2 * d));
      norm = proxy.poly_norm(p);
    } while (norm < 1e-9);
    p = p.scaled(Complex((1.0 - eps) / norm, 0.0));

    BalanceConfig cfg;
    cfg.ensemble = reference;
    cfg.max_rounds = max_rounds;
    cfg.tolerance = tolerance;
    cfg.threads = 1;  // instances are already parallel
    auto [balanced, report] = balance(factor(p), cfg);
    balanced = equalize_factor_norms(balanced, proxy);

    ProbeRow row;
    row.d = d;
    row.n = n;
    row.eps = eps;
    row.instance = static_cast<int>(i);
    row.achieved_cost = cost(balanced);
    double worst = 0.0;
    for (const auto& factor_poly : absorb_scalars(balanced)) {
      worst = std::max(worst, proxy.poly_norm(factor_poly));
    }
    row.success = worst < 1.0;
    row.achieved_m = row.success ? balanced.length() : -1;
    rows[i] = std::move(row);
  });
  return rows;
}

std::string probe_table_csv(const std::vector<ProbeRow>& rows) {
  std::string out = "d,n,eps,instance,success,achieved_m,achieved_cost\n";
  for (const auto& r : rows) {
    out += std::to_string(r.d) + ',' + std::to_string(r.n) + ',' + fmt_double(r.eps) + ',' +
           std::to_string(r.instance) + ',' + (r.success ? '1' : '0') + ',' +
           std::to_string(r.achieved_m) + ',' + fmt_double(r.achieved_cost) + '\n';
  }
  return out;
}

}  // namespace ncfact
