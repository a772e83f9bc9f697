// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/selftest.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ncfact/balancer.hpp"
#include "ncfact/errors.hpp"
#include "ncfact/format.hpp"
#include "ncfact/harness.hpp"
#include "ncfact/json_io.hpp"

namespace ncfact {

namespace {

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}

  void check(bool ok, const std::string& msg) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (first_.empty()) first_ = msg;
    }
  }

  void check_le(double value, double bound, const std::string& msg) {
    check(std::isfinite(value) && value <= bound,
          msg + " (got " + fmt_double(value) + ", bound " + fmt_double(bound) + ")");
  }

  bool passed() const { return failures_ == 0; }

  void print(std::ostream& out) const {
    if (passed()) {
      out << name_ << ": PASS (" << checks_ << " checks)\n";
    } else {
      out << name_ << ": FAIL (" << failures_ << "/" << checks_ << " checks) -- " << first_
          << "\n";
    }
  }

 private:
  std::string name_;
  int checks_ = 0;
  int failures_ = 0;
  std::string first_;
};

EnsembleSpec small_haar(int dim, int gens, std::uint64_t seed, int samples) {
  EnsembleSpec spec;
  spec.kind = EnsembleKind::haar_unitary;
  spec.dim = dim;
  spec.gen_count = gens;
  spec.seed = seed;
  spec.samples = samples;
  return spec;
}

void run_ncpoly(Suite& suite) {
  RandomStream stream(101);
  for (int trial = 0; trial < 25; ++trial) {
    MatPoly p = random_poly(stream, 2, 3, 2, 2, 3, true);
    MatPoly q = random_poly(stream, 3, 2, 2, 2, 3, true);
    MatPoly r = random_poly(stream, 2, 2, 2, 2, 3, true);
    suite.check_le(max_abs_diff(p.matmul(q).matmul(r), p.matmul(q.matmul(r))), 1e-12,
                   "matmul associativity");
    MatPoly q2 = random_poly(stream, 3, 2, 2, 2, 3, true);
    suite.check_le(max_abs_diff(p.matmul(q.add(q2)), p.matmul(q).add(p.matmul(q2))), 1e-12,
                   "matmul distributes over add");
    suite.check_le(max_abs_diff(p.adjoint().adjoint(), p), 0.0, "adjoint involution");
    suite.check_le(max_abs_diff(p.matmul(q).adjoint(), q.adjoint().matmul(p.adjoint())),
                   1e-12, "adjoint reverses products");
    suite.check(p.matmul(q).degree() <= p.degree() + q.degree(), "matmul degree bound");
    suite.check_le(max_abs_diff(MatPoly::identity(2).matmul(p), p), 0.0, "left unit");
  }

  // Free semantics: x1 x1* does not collapse to 1.
  ScalarMatrix one = ScalarMatrix::Identity(1, 1);
  MatPoly x1 = MatPoly::from_term(parse_word("x1"), one);
  MatPoly x1s = MatPoly::from_term(parse_word("x1*"), one);
  MatPoly prod = x1.matmul(x1s);
  suite.check(prod.term_count() == 1 && prod.terms().begin()->first == parse_word("x1 x1*"),
              "free product keeps x1 x1*");

  // Word grammar round trip and rejections.
  for (const char* text : {"1", "x1", "x2*", "x1 x2* x1", "x16 x16*"}) {
    suite.check(format_word(parse_word(text)) == text, std::string("word round trip ") + text);
  }
  for (const char* text : {"x0", "x17", "y1", "x", "x1**", "x1 1"}) {
    bool rejected = false;
    try {
      parse_word(text);
    } catch (const InputError&) {
      rejected = true;
    }
    suite.check(rejected, std::string("word grammar rejects ") + text);
  }

  // Pruning changes evaluation by at most (pruned terms) * threshold * 1 for
  // unitary representations.
  {
    RandomStream gs(77);
    MatPoly base = random_poly(gs, 2, 2, 2, 2, 4, true);
    const int tiny_terms = 3;
    MatPoly augmented = base;
    ScalarMatrix tiny = ScalarMatrix::Constant(2, 2, Complex(0.4e-14, 0.0));
    ScalarMatrix acc = ScalarMatrix::Zero(2, 2);
    for (int t = 0; t < tiny_terms; ++t) {
      augmented = augmented.add(MatPoly::from_term(parse_word("x1 x2"), tiny));
      acc += tiny;
    }
    Representation rep = sample_representation(small_haar(6, 2, 5, 1), 0);
    ScalarMatrix direct = eval(base, rep) + kron(acc, eval_word(parse_word("x1 x2"), rep));
    suite.check_le(max_abs(ScalarMatrix(eval(augmented, rep) - direct)),
                   tiny_terms * kPruneThreshold * 1.0, "pruning evaluation bound");
  }

  // JSON round trip, duplicate words summed.
  {
    RandomStream gs(12);
    MatPoly p = random_poly(gs, 2, 2, 3, 2, 4, false);
    MatPoly back = poly_from_json(poly_to_json(p));
    suite.check_le(max_abs_diff(p, back), 0.0, "polynomial JSON round trip");
    Json dup = parse_json_text(R"({"rows":1,"cols":1,"terms":[
        {"word":"x1","coeff":[[[1.0,0.0]]]},
        {"word":"x1","coeff":[[[2.0,0.0]]]}]})",
                               "dup test");
    MatPoly summed = poly_from_json(dup);
    suite.check(summed.term_count() == 1 &&
                    std::abs(summed.coeff(parse_word("x1"))(0, 0) - Complex(3.0, 0.0)) == 0.0,
                "duplicate words summed");
  }
}

void run_factorizer(Suite& suite) {
  RandomStream stream(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(stream.uniform_below(3));
    const int cols = 1 + static_cast<int>(stream.uniform_below(3));
    MatPoly p = random_poly(stream, rows, cols, 4, 2, 6, true);
    Factorization f = factor(p);
    suite.check_le(max_abs_diff(expand(f), p), 1e-9, "reconstruction");
    suite.check(f.length() == static_cast<int>(std::max<std::size_t>(p.degree(), 1)),
                "chain length is max(degree, 1)");
    bool blocks_ok = true;
    for (const auto& d : f.diags) {
      for (const auto& blk : d.blocks) {
        if (blk.degree() > 1) blocks_ok = false;
        if (blk.form() == DegreeOneFactor::Form::mixed) blocks_ok = false;
      }
    }
    suite.check(blocks_ok, "blocks are degree <= 1 and single-type");
  }

  // Monomial chain cost is the coefficient norm.
  {
    RandomStream gs(5);
    ScalarMatrix a(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) a(i, j) = gs.complex_normal();
    }
    Factorization f = factor_monomial(a, parse_word("x1 x2*"));
    suite.check_le(std::abs(cost(f) - spectral_norm_svd(a)), 1e-12, "monomial cost");
    suite.check_le(max_abs_diff(expand(f), MatPoly::from_term(parse_word("x1 x2*"), a)), 0.0,
                   "monomial expansion is exact");
    Factorization unit = factor_monomial(a, Word::unit());
    suite.check(unit.length() == 1, "empty word gets one unit factor");
    suite.check_le(max_abs_diff(expand(unit), MatPoly::constant(a)), 0.0,
                   "unit-word expansion is exact");
  }

  // Hermitization: self-adjoint, exact bracket extraction, norm equality.
  {
    RandomStream gs(31);
    Representation rep = sample_representation(small_haar(16, 2, 9, 1), 0);
    for (int trial = 0; trial < 10; ++trial) {
      MatPoly yp = random_poly(gs, 2, 2, 1, 2, 3, false);
      DegreeOneFactor y;
      y.size = 2;
      y.a0 = yp.coeff(Word::unit());
      for (int j = 1; j <= 2; ++j) {
        ScalarMatrix aj = yp.coeff(Word({Letter{j, false}}));
        ScalarMatrix bj = yp.coeff(Word({Letter{j, true}}));
        if (max_abs(aj) > 0) y.a[j] = aj;
        if (max_abs(bj) > 0) y.b[j] = bj;
      }
      DegreeOneFactor h = hermitize(y);
      suite.check(h.self_adjoint(), "hermitization is self-adjoint");
      auto [bl, br] = dehermitize_bracket(y.size);
      suite.check_le(max_abs_diff(MatPoly::constant(bl).matmul(h.to_poly()).matmul(
                                      MatPoly::constant(br)),
                                  y.to_poly()),
                     0.0, "bracket extraction is exact");
      const double ny = operator_norm(eval(y.to_poly(), rep)).value;
      const double nh = operator_norm(eval(h.to_poly(), rep)).value;
      suite.check_le(std::abs(nh - ny), 1e-8 * std::max(1.0, ny),
                     "hermitization preserves the operator norm");
    }
  }
}

void run_rewriting(Suite& suite) {
  RandomStream stream(777);
  Representation rep = sample_representation(small_haar(8, 2, 40, 1), 0);
  for (int trial = 0; trial < 100; ++trial) {
    MatPoly p = random_poly(stream, 1 + static_cast<int>(stream.uniform_below(2)),
                            1 + static_cast<int>(stream.uniform_below(2)), 3, 2, 4, true);
    Factorization f = factor(p);
    const MatPoly ref = expand(f);
    const double c0 = cost(f);

    Factorization sb = single_blockify(f);
    suite.check_le(max_abs_diff(expand(sb), ref), 1e-12, "single_blockify preserves expand");
    suite.check_le(cost(sb), c0 * (1.0 + 1e-12), "single_blockify never increases cost");
    bool single = true;
    for (const auto& d : sb.diags) {
      int non_unit = 0;
      for (const auto& blk : d.blocks) {
        if (!blk.is_unit()) ++non_unit;
      }
      if (non_unit > 1) single = false;
    }
    suite.check(single, "single_blockify leaves at most one non-unit block");

    Factorization es = equalize_sizes(f);
    suite.check_le(max_abs_diff(expand(es), ref), 1e-12, "equalize_sizes preserves expand");
    suite.check_le(cost(es), c0 * (1.0 + 1e-12), "equalize_sizes never increases cost");
    bool equal_sizes = true;
    for (const auto& d : es.diags) {
      if (d.size() != es.diags.front().size()) equal_sizes = false;
    }
    suite.check(equal_sizes, "equalize_sizes equalizes interior sizes");

    Factorization el = equalize_length(f, f.length() + 2);
    suite.check_le(max_abs_diff(expand(el), ref), 1e-12, "equalize_length preserves expand");
    suite.check_le(std::abs(cost(el) - c0), c0 * 1e-12 + 1e-300,
                   "equalize_length preserves cost");

    if (trial < 25) {
      // Theorem-style absorbed chain: degree <= 1 factors whose product is p.
      std::vector<MatPoly> chain = absorb_scalars(f);
      MatPoly prod = chain.front();
      bool degrees_ok = chain.front().degree() <= 1;
      for (std::size_t l = 1; l < chain.size(); ++l) {
        prod = prod.matmul(chain[l]);
        degrees_ok = degrees_ok && chain[l].degree() <= 1;
      }
      suite.check(degrees_ok, "absorbed factors have degree <= 1");
      suite.check_le(max_abs_diff(prod, ref), 1e-9, "absorbed product matches expand");

      // Norm chain under a fixed representation.
      double bound = cost(f);
      for (const auto& d : f.diags) {
        bound *= operator_norm(eval(d.to_poly(), rep)).value;
      }
      const double direct = operator_norm(eval(ref, rep)).value;
      suite.check_le(direct, bound + 1e-7, "submultiplicative norm chain");
    }
  }
}

void run_repnorm(Suite& suite, int threads) {
  RandomStream stream(31337);
  // Evaluation is a *-homomorphism.
  for (int trial = 0; trial < 100; ++trial) {
    MatPoly p = random_poly(stream, 2, 2, 2, 2, 3, false);
    MatPoly q = random_poly(stream, 2, 2, 2, 2, 3, false);
    Representation rep = sample_representation(small_haar(16, 2, 1000 + trial, 1), 0);
    ScalarMatrix lhs = eval(p.matmul(q), rep);
    ScalarMatrix rhs = eval(p, rep) * eval(q, rep);
    const double scale =
        1.0 + operator_norm(eval(p, rep)).value * operator_norm(eval(q, rep)).value;
    suite.check_le(max_abs(ScalarMatrix(lhs - rhs)), 1e-9 * scale, "eval homomorphism");
    suite.check_le(max_abs(ScalarMatrix(eval(p.adjoint(), rep) - eval(p, rep).adjoint())),
                   1e-12 * (1.0 + max_abs(eval(p, rep))), "eval star compatibility");
  }

  // Unitarity applies at evaluation time only.
  {
    Representation rep = sample_representation(small_haar(12, 1, 4, 1), 0);
    MatPoly p = MatPoly::from_term(parse_word("x1 x1*"), ScalarMatrix::Identity(2, 2));
    suite.check_le(
        max_abs(ScalarMatrix(eval(p, rep) - ScalarMatrix::Identity(24, 24))), 1e-12,
        "x1 x1* evaluates to the identity");
  }

  // Norm methods agree.
  {
    RandomStream gs(91);
    ScalarMatrix a(200, 200);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = gs.complex_normal();
    }
    const double svd = spectral_norm_svd(a);
    const double pow = spectral_norm_power(a);
    suite.check_le(std::abs(svd - pow), 1e-7 * svd, "power iteration agrees with SVD");
    suite.check_le(std::abs(operator_norm(ScalarMatrix::Identity(64, 64)).value - 1.0), 1e-12,
                   "norm of the identity");
    ScalarMatrix d = ScalarMatrix::Zero(2, 2);
    d(0, 0) = Complex(3, 0);
    d(1, 1) = Complex(0, -4);
    suite.check_le(std::abs(operator_norm(d).value - 4.0), 1e-12, "norm of diag(3, -4i)");
  }

  // Sampling determinism and unitarity.
  for (auto kind : {EnsembleKind::haar_unitary, EnsembleKind::uniform_permutation,
                    EnsembleKind::circulant_shift}) {
    for (int dim : {1, 5, 32}) {
      EnsembleSpec spec;
      spec.kind = kind;
      spec.dim = dim;
      spec.gen_count = 2;
      spec.seed = 99;
      spec.samples = 2;
      Representation r1 = sample_representation(spec, 1);
      Representation r2 = sample_representation(spec, 1);
      bool identical = true;
      bool unitary = true;
      for (int j = 1; j <= 2; ++j) {
        if (!(r1.unitaries.at(j).array() == r2.unitaries.at(j).array()).all()) {
          identical = false;
        }
        if (!is_unitary_within(r1.unitaries.at(j), kUnitarityTol)) unitary = false;
      }
      suite.check(identical, "sampling determinism " + ensemble_kind_name(kind));
      suite.check(unitary, "sampled matrices are unitary " + ensemble_kind_name(kind));
    }
  }

  // Shift-representation analytic norms.
  {
    MatPoly cosine = MatPoly::from_term(parse_word("x1"), ScalarMatrix::Identity(1, 1))
                         .add(MatPoly::from_term(parse_word("x1*"),
                                                 ScalarMatrix::Identity(1, 1)));
    for (int n : {3, 8, 64}) {
      Representation rep = shift_representation(n, 1);
      suite.check_le(std::abs(eval_norm(cosine, rep).value - 2.0), 1e-9,
                     "|| x1 + x1* || = 2 under the shift");
    }
    Representation rep = shift_representation(7, 1);
    std::vector<Letter> letters(7, Letter{1, false});
    MatPoly power = MatPoly::from_term(Word(letters), ScalarMatrix::Identity(1, 1));
    suite.check_le(std::abs(eval_norm(power, rep).value - 1.0), 1e-12,
                   "shift has order N");
  }

  // Haar moment E |tr U|^2 = 1, Monte Carlo.
  {
    EnsembleSpec spec = small_haar(16, 1, 2718, 600);
    double acc = 0.0;
    for (int s = 0; s < spec.samples; ++s) {
      Representation rep = sample_representation(spec, s);
      acc += std::norm(rep.unitaries.at(1).trace());
    }
    acc /= spec.samples;
    suite.check_le(std::abs(acc - 1.0), 0.12, "Haar moment E|tr U|^2");
  }

  // proxy_norm determinism across thread counts.
  {
    MatPoly p = MatPoly::from_term(parse_word("x1"), ScalarMatrix::Identity(1, 1))
                    .add(MatPoly::from_term(parse_word("x2"), ScalarMatrix::Identity(1, 1)));
    NormSummary s1 = proxy_norm(p, small_haar(24, 2, 7, 6), 1);
    NormSummary s2 = proxy_norm(p, small_haar(24, 2, 7, 6), threads);
    suite.check(s1.per_sample == s2.per_sample, "proxy_norm independent of thread count");
  }
}

void run_balancer(Suite& suite, int threads) {
  RandomStream stream(4242);
  EnsembleSpec ref = small_haar(16, 2, 555, 3);
  for (int trial = 0; trial < 20; ++trial) {
    MatPoly p = random_poly(stream, 1, 1, 2, 2, 4, false);
    NormProxy proxy(ref);
    const double pn = proxy.poly_norm(p);
    if (pn < 1e-9) continue;
    p = p.scaled(Complex(0.5 / pn, 0.0));

    BalanceConfig cfg;
    cfg.ensemble = ref;
    cfg.max_rounds = 20;
    cfg.tolerance = 1e-8;
    cfg.threads = threads;
    Factorization f = factor(p);
    auto [balanced, report] = balance(f, cfg);

    suite.check_le(report.final_cost, report.initial_cost + cfg.tolerance,
                   "balance is monotone");
    suite.check_le(max_abs_diff(expand(balanced), expand(f)),
                   1e-9 * std::max(1.0, p.max_abs_coeff()), "balance preserves expand");
    bool degree_ok = true;
    for (const auto& d : balanced.diags) {
      for (const auto& blk : d.blocks) {
        if (blk.degree() > 1) degree_ok = false;
      }
    }
    suite.check(degree_ok, "balance keeps blocks at degree <= 1");

    // Rescaled chains have unit-norm diagonal factors and equal alpha norms.
    Factorization rescaled = rescale_blocks(f, cfg);
    NormProxy proxy2(ref);
    double lo = 1e300, hi = 0.0;
    for (const auto& d : rescaled.diags) {
      const double n = proxy2.diag_norm(d);
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    suite.check(lo >= 1.0 - 1e-6 && hi <= 1.0 + 1e-6, "rescale normalizes diagonal factors");
    double alo = 1e300, ahi = 0.0;
    for (const auto& alpha : rescaled.alphas) {
      const double n = spectral_norm_svd(alpha);
      alo = std::min(alo, n);
      ahi = std::max(ahi, n);
    }
    suite.check(ahi <= alo * (1.0 + 1e-6), "rescale equalizes alpha norms");
  }
}

void run_harness(Suite& suite, int threads) {
  MatPoly p = MatPoly::from_term(parse_word("x1"), ScalarMatrix::Identity(1, 1))
                  .add(MatPoly::from_term(parse_word("x2"), ScalarMatrix::Identity(1, 1)));
  for (auto kind : {EnsembleKind::haar_unitary, EnsembleKind::uniform_permutation}) {
    TransferConfig cfg;
    cfg.polynomial = p;
    cfg.kind = kind;
    cfg.sizes = {6, 12};
    cfg.samples_per_size = 4;
    cfg.seed = 11;
    cfg.threads = threads;
    bool completed = true;
    try {
      TransferReport report = run_transfer(cfg);
      suite.check(report.rows.size() == 8, "transfer row count");
      for (const auto& row : report.rows) {
        suite.check_le(row.direct_norm, row.bound + kTransferBoundTol,
                       "transfer bound per sample");
      }
      TransferReport sa = run_transfer_sa(cfg);
      for (std::size_t i = 0; i < report.rows.size(); ++i) {
        suite.check_le(std::abs(sa.rows[i].direct_norm - report.rows[i].direct_norm), 1e-9,
                       "self-adjoint mode keeps direct norms");
      }
    } catch (const Error&) {
      completed = false;
    }
    suite.check(completed, "transfer completes for " + ensemble_kind_name(kind));
  }

  // Substitution commutes with expansion.
  {
    RandomStream gs(9);
    MatPoly q = random_poly(gs, 2, 2, 2, 2, 3, true);
    Factorization f = factor(q);
    Representation rep = sample_representation(small_haar(8, 2, 23, 1), 0);
    ScalarMatrix chain = kron(f.alphas[0], ScalarMatrix::Identity(8, 8));
    for (std::size_t l = 0; l < f.diags.size(); ++l) {
      chain = chain * eval(f.diags[l].to_poly(), rep);
      chain = chain * kron(f.alphas[l + 1], ScalarMatrix::Identity(8, 8));
    }
    ScalarMatrix direct = eval(expand(f), rep);
    suite.check_le(max_abs(ScalarMatrix(chain - direct)),
                   1e-9 * (1.0 + max_abs(direct)), "substitution commutes with expansion");
  }

  // Probability variant: a single unitary letter never exceeds reference 1 + eps.
  {
    TransferConfig cfg;
    cfg.polynomial = MatPoly::from_term(parse_word("x1"), ScalarMatrix::Identity(1, 1));
    cfg.kind = EnsembleKind::haar_unitary;
    cfg.sizes = {4, 8};
    cfg.samples_per_size = 5;
    cfg.seed = 3;
    cfg.epsilon = 1.0;
    cfg.factor_references = std::vector<double>{1.0};
    cfg.threads = threads;
    TransferReport report = run_probability_variant(cfg);
    bool all_zero = true;
    for (const auto& row : report.rows) {
      if (row.exceed_flag != 0) all_zero = false;
    }
    suite.check(all_zero, "unitary letter never exceeds 1 + eps");
  }
}

}  // namespace

int selftest(int threads, std::ostream& out) {
  int failures = 0;
  std::ostringstream buffer;

  {
    Suite s("ncpoly");
    run_ncpoly(s);
    s.print(buffer);
    failures += s.passed() ? 0 : 1;
  }
  {
    Suite s("factorizer");
    run_factorizer(s);
    s.print(buffer);
    failures += s.passed() ? 0 : 1;
  }
  {
    Suite s("rewriting");
    run_rewriting(s);
    s.print(buffer);
    failures += s.passed() ? 0 : 1;
  }
  {
    Suite s("repnorm");
    run_repnorm(s, threads);
    s.print(buffer);
    failures += s.passed() ? 0 : 1;
  }
  {
    Suite s("balancer");
    run_balancer(s, threads);
    s.print(buffer);
    failures += s.passed() ? 0 : 1;
  }
  {
    Suite s("harness");
    run_harness(s, threads);
    s.print(buffer);
    failures += s.passed() ? 0 : 1;
  }
  out << buffer.str();
  out << (failures == 0 ? "selftest: all suites passed\n"
                        : "selftest: " + std::to_string(failures) + " suite(s) failed\n");
  return failures;
}

}  // namespace ncfact
