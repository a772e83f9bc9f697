// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Heuristic post-processing of a factorization chain: normalize every block
// factor to proxy norm 1, spread the scalar weight evenly over the alphas,
// then run a deterministic coordinate descent over diagonal similarity
// insertions to shrink the cost witness prod ||alpha_l||. The descent only
// ever accepts strictly improving moves, so the reported cost is monotone.

#ifndef NCFACT_BALANCER_HPP
#define NCFACT_BALANCER_HPP

#include <optional>
#include <vector>

#include "ncfact/factorization.hpp"
#include "ncfact/repnorm.hpp"

namespace ncfact {

/// Norm proxy used by the balancer: either a fixed representation or an
/// ensemble (in which case the per-sample maximum is used). The sampled
/// representations are materialized once and reused for every probe.
class NormProxy {
 public:
  explicit NormProxy(Representation rep);
  NormProxy(const EnsembleSpec& spec, int threads = 0);

  double poly_norm(const MatPoly& p) const;
  double block_norm(const DegreeOneFactor& y) const;
  double diag_norm(const BlockDiagonal& d) const;
  const std::vector<Representation>& representations() const { return reps_; }

 private:
  std::vector<Representation> reps_;
};

struct BalanceConfig {
  std::optional<EnsembleSpec> ensemble;      // exactly one of these two
  std::optional<Representation> representation;
  int max_rounds = 50;
  bool similarity_search = true;
  double tolerance = 1e-9;
  int threads = 0;
};

struct BalanceReport {
  double initial_cost = 0.0;  // cost after the initial block rescaling
  double final_cost = 0.0;
  std::vector<double> round_costs;
  /// final_cost / proxy_norm(expand) - 1; the slack of the cost witness
  /// relative to the target polynomial's proxy norm.
  double achieved_epsilon = 0.0;
  int m = 0;
};

/// Divides each diagonal factor by its proxy norm (folding the scalar into
/// the following alpha), then equalizes the alpha norms geometrically with
/// positive scalars of product one. Expansion is preserved; the equalization
/// step leaves the cost unchanged. Throws InputError on a zero-norm diagonal
/// factor.
Factorization rescale_blocks(const Factorization& f, const BalanceConfig& cfg);

/// Coordinate descent over inserted (beta, beta^-1) pairs between adjacent
/// factors, beta positive diagonal, minimizing the cost witness subject to
/// proxy norm <= 1 on every diagonal factor. Every block stays degree <= 1
/// and expansion is verified after every round. Non-improvement is a valid
/// outcome.
std::pair<Factorization, BalanceReport> similarity_descent(const Factorization& f,
                                                           const BalanceConfig& cfg);

/// rescale_blocks followed by similarity_descent when enabled.
std::pair<Factorization, BalanceReport> balance(const Factorization& f,
                                                const BalanceConfig& cfg);

/// Rescales the alphas (product of scalars = 1) so the absorbed factors
/// P_1 = alpha_0 D_1 alpha_1, P_l = D_l alpha_l all have equal proxy norm.
/// Expansion and cost are unchanged.
Factorization equalize_factor_norms(const Factorization& f, const NormProxy& proxy);

struct ProbeRow {
  int d = 0;
  int n = 0;
  double eps = 0.0;
  int instance = 0;
  bool success = false;
  int achieved_m = -1;      // -1 when no all-factors-below-1 chain was reached
  double achieved_cost = 0.0;
};

/// Seeded corpus probe: random degree <= d, n x n polynomials normalized to
/// proxy norm 1 - eps, then factor -> balance -> absorb. Success means every
/// absorbed factor has proxy norm < 1; failures are data, not errors.
std::vector<ProbeRow> probe_m(int d, int n, double eps, std::uint64_t corpus_seed,
                              int count, const EnsembleSpec& reference, int threads = 0,
                              int max_rounds = 40, double tolerance = 1e-8);

std::string probe_table_csv(const std::vector<ProbeRow>& rows);

/// Deterministic random polynomial used by the probe corpus and tests.
MatPoly random_poly(RandomStream& stream, int rows, int cols, int max_degree,
                    int gen_count, int max_terms, bool unit_grid = false);

}  // namespace ncfact

#endif  // NCFACT_BALANCER_HPP
