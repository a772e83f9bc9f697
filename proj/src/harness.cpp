// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncfact/errors.hpp"
#include "ncfact/format.hpp"
#include "ncfact/parallel.hpp"

namespace ncfact {

namespace {

void validate_config(const TransferConfig& cfg) {
  if (cfg.sizes.empty()) throw InputError("transfer config needs at least one size");
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] < 1) throw InputError("transfer sizes must be positive");
    if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1]) {
      throw InputError("transfer sizes must be strictly increasing");
    }
  }
  if (cfg.samples_per_size < 1) throw InputError("samples_per_size must be >= 1");
  if (cfg.epsilon.has_value() && !(*cfg.epsilon > 0.0)) {
    throw InputError("epsilon must be positive");
  }
}

double diag_norm_under(const BlockDiagonal& d, const Representation& rep) {
  double best = 0.0;
  for (const auto& blk : d.blocks) {
    best = std::max(best, operator_norm(eval(blk.to_poly(), rep)).value);
  }
  return best;
}

void check_hermitian_under(const BlockDiagonal& d, const Representation& rep) {
  for (const auto& blk : d.blocks) {
    ScalarMatrix m = eval(blk.to_poly(), rep);
    if (max_abs(ScalarMatrix(m - m.adjoint())) > 1e-10) {
      throw VerifyError("substituted self-adjoint factor is not Hermitian under " + rep.label);
    }
  }
}

}  // namespace

Factorization hermitize_chain(const Factorization& f) {
  f.validate();
  const std::size_t m = f.diags.size();
  Factorization out;
  out.out_rows = f.out_rows;
  out.out_cols = f.out_cols;
  out.alphas = f.alphas;

  std::vector<ScalarMatrix> lefts(m), rights(m);
  out.diags.resize(m);
  for (std::size_t l = 0; l < m; ++l) {
    const Eigen::Index n = f.diags[l].size();
    ScalarMatrix left = ScalarMatrix::Zero(n, 2 * n);
    ScalarMatrix right = ScalarMatrix::Zero(2 * n, n);
    Eigen::Index off = 0;
    BlockDiagonal hd;
    for (const auto& blk : f.diags[l].blocks) {
      hd.blocks.push_back(hermitize(blk));
      auto [bl, br] = dehermitize_bracket(blk.size);
      left.block(off, 2 * off, blk.size, 2 * blk.size) = bl;
      right.block(2 * off, off, 2 * blk.size, blk.size) = br;
      off += blk.size;
    }
    out.diags[l] = std::move(hd);
    lefts[l] = std::move(left);
    rights[l] = std::move(right);
  }
  for (std::size_t l = 0; l < m; ++l) {
    out.alphas[l] = out.alphas[l] * lefts[l];
    out.alphas[l + 1] = rights[l] * out.alphas[l + 1];
  }
  out.validate();
  return out;
}

TransferReport run_transfer(const TransferConfig& cfg) {
  validate_config(cfg);

  Factorization chain = factor(cfg.polynomial);
  if (cfg.self_adjoint_mode) chain = hermitize_chain(chain);

  TransferReport report;
  report.m = chain.length();
  report.alpha_cost = cost(chain);

  const int gen_count = std::max(1, std::max(cfg.polynomial.max_generator(),
                                             chain.max_generator()));
  const std::size_t per = static_cast<std::size_t>(cfg.samples_per_size);
  const std::size_t total = cfg.sizes.size() * per;
  report.rows.assign(total, TransferSampleRow{});

  parallel_for(total, cfg.threads, [&](std::size_t idx) {
    const std::size_t si = idx / per;
    const int sample = static_cast<int>(idx % per);
    const int n = cfg.sizes[si];

    EnsembleSpec spec;
    spec.kind = cfg.kind;
    spec.dim = n;
    spec.gen_count = gen_count;
    // Independent streams per size.
    spec.seed = mix_salt(cfg.seed, static_cast<std::uint64_t>(n));
    spec.samples = cfg.samples_per_size;
    Representation rep = sample_representation(spec, sample);

    TransferSampleRow row;
    row.size = n;
    row.sample = sample;
    row.direct_norm = operator_norm(eval(cfg.polynomial, rep)).value;
    row.factor_norms.reserve(chain.diags.size());
    double prod = report.alpha_cost;
    double max_factor = 0.0;
    for (const auto& d : chain.diags) {
      if (cfg.self_adjoint_mode) check_hermitian_under(d, rep);
      const double fn = diag_norm_under(d, rep);
      row.factor_norms.push_back(fn);
      prod *= fn;
      max_factor = std::max(max_factor, fn);
    }
    row.bound = prod;
    row.max_factor_norm = max_factor;
    if (row.direct_norm > row.bound + kTransferBoundTol) {
      throw VerifyError("submultiplicative bound violated at N=" + std::to_string(n) +
                        ", sample " + std::to_string(sample) + ": direct " +
                        fmt_double(row.direct_norm) + " > bound " + fmt_double(row.bound));
    }
    report.rows[idx] = std::move(row);
  });

  // Probability variant: exceedance counting against per-factor references.
  if (cfg.epsilon.has_value()) {
    const double eps = *cfg.epsilon;
    const std::size_t nfac = chain.diags.size();
    if (cfg.factor_references.has_value()) {
      if (cfg.factor_references->size() != nfac) {
        throw InputError("expected " + std::to_string(nfac) +
                         " factor reference values, got " +
                         std::to_string(cfg.factor_references->size()));
      }
      report.references_used = *cfg.factor_references;
    } else {
      // Median factor norm at the largest size stands in for the limit.
      report.references_from_proxy = true;
      const std::size_t base = (cfg.sizes.size() - 1) * per;
      for (std::size_t l = 0; l < nfac; ++l) {
        std::vector<double> vals;
        vals.reserve(per);
        for (std::size_t s = 0; s < per; ++s) {
          vals.push_back(report.rows[base + s].factor_norms[l]);
        }
        std::sort(vals.begin(), vals.end());
        const std::size_t h = vals.size() / 2;
        report.references_used.push_back(
            vals.size() % 2 == 1 ? vals[h] : 0.5 * (vals[h - 1] + vals[h]));
      }
    }
    double ref_prod = report.alpha_cost;
    for (double r : report.references_used) ref_prod *= r;
    for (auto& row : report.rows) {
      bool factor_exceeds = false;
      for (std::size_t l = 0; l < nfac; ++l) {
        if (row.factor_norms[l] > report.references_used[l] + eps) factor_exceeds = true;
      }
      const bool poly_exceeds = row.direct_norm > ref_prod + eps;
      row.exceed_flag = (factor_exceeds || poly_exceeds) ? 1 : 0;
    }
  }

  // Per-size order statistics.
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    TransferSizeSummary sum;
    sum.size = cfg.sizes[si];
    std::vector<double> direct;
    direct.reserve(per);
    int factor_exceed = 0;
    int poly_exceed = 0;
    const double ref_prod = [&] {
      double p = report.alpha_cost;
      for (double r : report.references_used) p *= r;
      return p;
    }();
    for (std::size_t s = 0; s < per; ++s) {
      const auto& row = report.rows[si * per + s];
      direct.push_back(row.direct_norm);
      if (cfg.epsilon.has_value()) {
        bool fe = false;
        for (std::size_t l = 0; l < report.references_used.size(); ++l) {
          if (row.factor_norms[l] > report.references_used[l] + *cfg.epsilon) fe = true;
        }
        factor_exceed += fe ? 1 : 0;
        poly_exceed += (row.direct_norm > ref_prod + *cfg.epsilon) ? 1 : 0;
      }
    }
    std::sort(direct.begin(), direct.end());
    sum.max_direct = direct.back();
    sum.mean_direct = std::accumulate(direct.begin(), direct.end(), 0.0) /
                      static_cast<double>(direct.size());
    const std::size_t h = direct.size() / 2;
    sum.median_direct =
        direct.size() % 2 == 1 ? direct[h] : 0.5 * (direct[h - 1] + direct[h]);
    sum.factor_exceed_fraction = static_cast<double>(factor_exceed) / static_cast<double>(per);
    sum.poly_exceed_fraction = static_cast<double>(poly_exceed) / static_cast<double>(per);
    report.per_size.push_back(sum);
  }
  return report;
}

TransferReport run_transfer_sa(TransferConfig cfg) {
  cfg.self_adjoint_mode = true;
  return run_transfer(cfg);
}

TransferReport run_probability_variant(TransferConfig cfg) {
  if (!cfg.epsilon.has_value()) {
    throw InputError("probability variant requires epsilon > 0");
  }
  return run_transfer(cfg);
}

std::string TransferReport::csv() const {
  std::string out = "N,sample,direct_norm,bound,max_factor_norm,exceed_flag\n";
  for (const auto& row : rows) {
    out += std::to_string(row.size) + ',' + std::to_string(row.sample) + ',' +
           fmt_double(row.direct_norm) + ',' + fmt_double(row.bound) + ',' +
           fmt_double(row.max_factor_norm) + ',' + std::to_string(row.exceed_flag) + '\n';
  }
  return out;
}

std::string TransferReport::summary_csv() const {
  std::string out =
      "N,max_direct,mean_direct,median_direct,factor_exceed_fraction,poly_exceed_fraction\n";
  for (const auto& s : per_size) {
    out += std::to_string(s.size) + ',' + fmt_double(s.max_direct) + ',' +
           fmt_double(s.mean_direct) + ',' + fmt_double(s.median_direct) + ',' +
           fmt_double(s.factor_exceed_fraction) + ',' + fmt_double(s.poly_exceed_fraction) +
           '\n';
  }
  return out;
}

}  // namespace ncfact
