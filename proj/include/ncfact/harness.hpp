// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale norm-transfer harness: factor a polynomial once symbolically,
// substitute random unitaries of growing size into the degree-1 factors, and
// compare the direct operator norm against the submultiplicative product
// bound prod ||alpha_l|| * prod ||D_l(N)||.

#ifndef NCFACT_HARNESS_HPP
#define NCFACT_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "ncfact/balancer.hpp"
#include "ncfact/factorization.hpp"
#include "ncfact/repnorm.hpp"

namespace ncfact {

struct TransferConfig {
  MatPoly polynomial{1, 1};
  EnsembleKind kind = EnsembleKind::haar_unitary;
  std::vector<int> sizes;  // strictly increasing
  int samples_per_size = 1;
  std::uint64_t seed = 0;
  bool self_adjoint_mode = false;
  /// Enables the probability variant: exceedance counting against per-factor
  /// reference norms plus epsilon.
  std::optional<double> epsilon;
  /// Per-factor reference norms; when absent the probability variant falls
  /// back to the median factor norms observed at the largest size.
  std::optional<std::vector<double>> factor_references;
  int threads = 0;
};

struct TransferSampleRow {
  int size = 0;
  int sample = 0;
  double direct_norm = 0.0;
  double bound = 0.0;
  double max_factor_norm = 0.0;
  std::vector<double> factor_norms;
  int exceed_flag = 0;
};

struct TransferSizeSummary {
  int size = 0;
  double max_direct = 0.0;
  double mean_direct = 0.0;
  double median_direct = 0.0;
  double factor_exceed_fraction = 0.0;
  double poly_exceed_fraction = 0.0;
};

struct TransferReport {
  int m = 0;
  double alpha_cost = 1.0;  // prod ||alpha_l||, representation-independent
  std::vector<TransferSampleRow> rows;        // sorted by (size, sample)
  std::vector<TransferSizeSummary> per_size;  // sorted by size
  std::vector<double> references_used;        // probability variant only
  bool references_from_proxy = false;

  /// Pinned per-sample columns: N,sample,direct_norm,bound,max_factor_norm,exceed_flag.
  std::string csv() const;
  std::string summary_csv() const;
};

/// Submultiplicative tolerance: a bound violated beyond this signals an
/// evaluation bug and aborts the run.
inline constexpr double kTransferBoundTol = 1e-7;

TransferReport run_transfer(const TransferConfig& cfg);

/// As run_transfer, but every block is hermitized first (with the extraction
/// brackets folded into the adjacent alphas), so every substituted factor is
/// self-adjoint; each substituted factor matrix is verified Hermitian.
TransferReport run_transfer_sa(TransferConfig cfg);

/// Exceedance-frequency variant; requires cfg.epsilon > 0.
TransferReport run_probability_variant(TransferConfig cfg);

/// Hermitizes every block of the chain and folds the extraction brackets into
/// the alphas; expansion is preserved exactly.
Factorization hermitize_chain(const Factorization& f);

}  // namespace ncfact

#endif  // NCFACT_HARNESS_HPP
