// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Batch front end over the ncfact C API. Every command reads/writes the
// library's JSON and CSV formats and uses stable exit codes:
//   0 success, 2 input error, 3 verification failure, 4 numeric
//   non-convergence, 1 anything else.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ncfact/ncfact.h"

namespace {

constexpr const char* kVersion = "ncfact 0.1.0";

std::string fmt17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

[[noreturn]] void fail(ncf_status status) {
  std::cerr << "error: " << ncf_last_error() << "\n";
  switch (status) {
    case NCF_ERR_INPUT: std::exit(2);
    case NCF_ERR_VERIFY: std::exit(3);
    case NCF_ERR_CONVERGENCE: std::exit(4);
    default: std::exit(1);
  }
}

void check(ncf_status status) {
  if (status != NCF_OK) fail(status);
}

struct StringOut {
  char* value = nullptr;
  ~StringOut() { ncf_string_free(value); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    std::exit(2);
  }
  out << content;
}

struct EnsembleFlags {
  std::string kind = "haar_unitary";
  int dim = 32;
  int gens = 0;  // 0: infer from the polynomial / factorization
  std::uint64_t seed = 0;
  int samples = 8;
  std::string json;  // full JSON spec overrides the individual flags

  void attach(CLI::App* cmd, bool with_samples = true, const char* seed_name = "--seed") {
    cmd->add_option("--kind", kind,
                    "ensemble kind: haar_unitary | uniform_permutation | circulant_shift");
    cmd->add_option("--dim", dim, "representation dimension N");
    cmd->add_option("--gens", gens, "generator count (default: inferred from the input)");
    cmd->add_option(seed_name, seed, "ensemble seed");
    if (with_samples) cmd->add_option("--samples", samples, "samples to draw");
    cmd->add_option("--ensemble-json", json, "full ensemble spec as a JSON object");
  }

  std::string spec(int inferred_gens) const {
    if (!json.empty()) return json;
    nlohmann::json j;
    j["kind"] = kind;
    j["dim"] = dim;
    j["gen_count"] = gens > 0 ? gens : std::max(1, inferred_gens);
    j["seed"] = seed;
    j["samples"] = samples;
    return j.dump();
  }
};

int poly_max_generator(const ncf_poly* p) {
  // The JSON round trip carries the word strings; scan them for the largest
  // generator index.
  StringOut text;
  check(ncf_poly_to_json(p, &text.value));
  nlohmann::json j = nlohmann::json::parse(text.value);
  int best = 0;
  for (const auto& term : j["terms"]) {
    std::istringstream words(term["word"].get<std::string>());
    std::string tok;
    while (words >> tok) {
      if (tok.size() > 1 && tok[0] == 'x') {
        if (tok.back() == '*') tok.pop_back();
        best = std::max(best, std::atoi(tok.c_str() + 1));
      }
    }
  }
  return best;
}

int fact_max_generator(const ncf_fact* f) {
  StringOut text;
  check(ncf_fact_to_json(f, &text.value));
  nlohmann::json j = nlohmann::json::parse(text.value);
  int best = 0;
  for (const auto& d : j["diags"]) {
    for (const auto& blk : d["blocks"]) {
      for (const char* key : {"a", "b"}) {
        if (!blk.contains(key)) continue;
        for (auto it = blk[key].begin(); it != blk[key].end(); ++it) {
          best = std::max(best, std::atoi(it.key().c_str()));
        }
      }
    }
  }
  return best;
}

nlohmann::json matrix_json(const double* reim, int rows, int cols) {
  nlohmann::json out = nlohmann::json::array();
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < cols; ++j) {
      row.push_back({reim[k], reim[k + 1]});
      k += 2;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<int> parse_size_list(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) sizes.push_back(std::atoi(item.c_str()));
  }
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix *-polynomial factorization and norm-transfer toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware default)");

  // ---- factorize ----
  auto* factorize = app.add_subcommand(
      "factorize", "factor a polynomial into a scalar/block-diagonal chain");
  std::string fz_in, fz_out;
  bool fz_single = false, fz_equal = false, fz_absorb = false;
  factorize->add_option("--in", fz_in, "input polynomial JSON")->required();
  factorize->add_option("--out", fz_out, "output file")->required();
  factorize->add_flag("--single-block", fz_single,
                      "rewrite every diagonal factor to a single non-unit block");
  factorize->add_flag("--equal-sizes", fz_equal, "pad all interior sizes to a common value");
  factorize->add_flag("--absorb", fz_absorb,
                      "write the degree-1 product chain instead of the alpha/D form");

  // ---- expand ----
  auto* expand_cmd = app.add_subcommand("expand", "expand a factorization back to a polynomial");
  std::string ex_in, ex_out;
  expand_cmd->add_option("--in", ex_in, "input factorization JSON")->required();
  expand_cmd->add_option("--out", ex_out, "output polynomial JSON")->required();

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a polynomial under a representation");
  std::string ev_in, ev_out;
  int ev_sample = 0;
  EnsembleFlags ev_flags;
  eval_cmd->add_option("--in", ev_in, "input polynomial JSON")->required();
  eval_cmd->add_option("--out", ev_out, "output matrix JSON")->required();
  eval_cmd->add_option("--sample", ev_sample, "sample index within the ensemble");
  ev_flags.attach(eval_cmd, /*with_samples=*/false);

  // ---- norm ----
  auto* norm_cmd = app.add_subcommand("norm", "proxy operator norms over an ensemble");
  std::string no_in, no_out;
  EnsembleFlags no_flags;
  norm_cmd->add_option("--in", no_in, "input polynomial JSON")->required();
  norm_cmd->add_option("--out", no_out, "per-sample CSV output (kind,N,sample_index,norm)");
  no_flags.attach(norm_cmd);

  // ---- balance ----
  auto* balance_cmd = app.add_subcommand("balance", "rescale and rebalance a factorization");
  std::string ba_in, ba_out, ba_report;
  int ba_rounds = 50;
  double ba_tol = 1e-9;
  bool ba_no_similarity = false;
  EnsembleFlags ba_flags;
  balance_cmd->add_option("--in", ba_in, "input factorization JSON")->required();
  balance_cmd->add_option("--out", ba_out, "output factorization JSON")->required();
  balance_cmd->add_option("--report", ba_report, "per-round cost trajectory CSV");
  balance_cmd->add_option("--rounds", ba_rounds, "maximum descent rounds");
  balance_cmd->add_option("--tol", ba_tol, "stop when a round improves cost by less");
  balance_cmd->add_flag("--no-similarity", ba_no_similarity,
                        "skip the similarity descent (rescale only)");
  ba_flags.attach(balance_cmd);

  // ---- probe-m ----
  auto* probe_cmd = app.add_subcommand("probe-m", "measure achievable chain lengths on a corpus");
  int pm_d = 2, pm_n = 1, pm_count = 20, pm_rounds = 40;
  double pm_eps = 0.1, pm_tol = 1e-8;
  std::uint64_t pm_seed = 0;
  std::string pm_out;
  EnsembleFlags pm_flags;
  probe_cmd->add_option("--d", pm_d, "maximum polynomial degree")->required();
  probe_cmd->add_option("--n", pm_n, "coefficient size n (n x n)")->required();
  probe_cmd->add_option("--eps", pm_eps, "corpus polynomials are normalized to 1 - eps");
  probe_cmd->add_option("--seed", pm_seed, "corpus seed");
  probe_cmd->add_option("--count", pm_count, "number of corpus instances");
  probe_cmd->add_option("--rounds", pm_rounds, "descent rounds per instance");
  probe_cmd->add_option("--tol", pm_tol, "descent stop tolerance");
  probe_cmd->add_option("--out", pm_out, "output CSV table")->required();
  pm_flags.attach(probe_cmd, /*with_samples=*/true, "--ensemble-seed");

  // ---- transfer ----
  auto* transfer_cmd = app.add_subcommand(
      "transfer", "norm-transfer harness over growing representation sizes");
  std::string tr_poly, tr_out, tr_summary, tr_sizes = "25,50,100,200", tr_refs;
  int tr_samples = 20;
  std::uint64_t tr_seed = 0;
  std::string tr_kind = "haar_unitary";
  bool tr_sa = false;
  double tr_eps = 0.0;
  transfer_cmd->add_option("--poly", tr_poly, "input polynomial JSON")->required();
  transfer_cmd->add_option("--kind", tr_kind, "ensemble kind");
  transfer_cmd->add_option("--sizes", tr_sizes, "comma-separated strictly increasing sizes");
  transfer_cmd->add_option("--samples", tr_samples, "samples per size");
  transfer_cmd->add_option("--seed", tr_seed, "master seed");
  transfer_cmd->add_flag("--self-adjoint", tr_sa, "hermitize every factor before substitution");
  transfer_cmd->add_option("--eps", tr_eps,
                           "enable the exceedance-frequency variant with this epsilon");
  transfer_cmd->add_option("--refs", tr_refs,
                           "comma-separated per-factor reference norms (default: largest-N medians)");
  transfer_cmd->add_option("--out", tr_out, "per-sample CSV output")->required();
  transfer_cmd->add_option("--summary-out", tr_summary, "per-size summary CSV output");

  // ---- sample ----
  auto* sample_cmd = app.add_subcommand("sample", "draw ensemble unitaries to a JSON file");
  std::string sa_out;
  EnsembleFlags sa_flags;
  sa_flags.gens = 1;
  sample_cmd->add_option("--out", sa_out, "output JSON file")->required();
  sa_flags.attach(sample_cmd);

  // ---- selftest ----
  auto* selftest_cmd = app.add_subcommand("selftest", "run the full invariant suite");

  for (auto* cmd : app.get_subcommands({})) {
    cmd->set_version_flag("--version", kVersion);
  }

  CLI11_PARSE(app, argc, argv);

  if (*factorize) {
    ncf_poly* p = nullptr;
    check(ncf_poly_read(fz_in.c_str(), &p));
    ncf_fact* f = nullptr;
    check(ncf_factor(p, &f));
    if (fz_single) {
      ncf_fact* next = nullptr;
      check(ncf_fact_single_blockify(f, &next));
      ncf_fact_free(f);
      f = next;
    }
    if (fz_equal) {
      ncf_fact* next = nullptr;
      check(ncf_fact_equalize_sizes(f, &next));
      ncf_fact_free(f);
      f = next;
    }
    // Internal reconstruction check before anything is written.
    ncf_poly* back = nullptr;
    check(ncf_fact_expand(f, &back));
    double diff = 0.0;
    check(ncf_poly_max_abs_diff(p, back, &diff));
    ncf_poly_free(back);
    if (!(diff <= 1e-9)) {
      std::cerr << "error: reconstruction check failed (max deviation " << fmt17(diff)
                << ")\n";
      return 3;
    }
    const double fcost = ncf_fact_cost(f);
    if (fz_absorb) {
      ncf_poly** chain = nullptr;
      size_t count = 0;
      check(ncf_fact_absorb(f, &chain, &count));
      nlohmann::json out;
      out["out_rows"] = ncf_poly_rows(p);
      out["out_cols"] = ncf_poly_cols(p);
      nlohmann::json factors = nlohmann::json::array();
      for (size_t i = 0; i < count; ++i) {
        StringOut text;
        check(ncf_poly_to_json(chain[i], &text.value));
        factors.push_back(nlohmann::json::parse(text.value));
      }
      out["factors"] = std::move(factors);
      out["cost"] = fcost;
      ncf_poly_array_free(chain, count);
      write_file(fz_out, out.dump(2) + "\n");
    } else {
      check(ncf_fact_write(f, fz_out.c_str()));
    }
    std::cout << "m = " << ncf_fact_length(f) << "\n";
    std::cout << "cost = " << fmt17(fcost) << "\n";
    ncf_fact_free(f);
    ncf_poly_free(p);
    return 0;
  }

  if (*expand_cmd) {
    ncf_fact* f = nullptr;
    check(ncf_fact_read(ex_in.c_str(), &f));
    ncf_poly* p = nullptr;
    check(ncf_fact_expand(f, &p));
    check(ncf_poly_write(p, ex_out.c_str()));
    std::cout << "rows = " << ncf_poly_rows(p) << "\ncols = " << ncf_poly_cols(p)
              << "\nterms = " << ncf_poly_term_count(p) << "\n";
    ncf_poly_free(p);
    ncf_fact_free(f);
    return 0;
  }

  if (*eval_cmd) {
    ncf_poly* p = nullptr;
    check(ncf_poly_read(ev_in.c_str(), &p));
    ncf_rep* rep = nullptr;
    check(ncf_rep_sample(ev_flags.spec(poly_max_generator(p)).c_str(), ev_sample, &rep));
    double* reim = nullptr;
    int rows = 0, cols = 0;
    check(ncf_eval(p, rep, &reim, &rows, &cols));
    nlohmann::json out;
    out["rows"] = rows;
    out["cols"] = cols;
    out["entries"] = matrix_json(reim, rows, cols);
    ncf_buffer_free(reim);
    write_file(ev_out, out.dump(2) + "\n");
    double norm = 0.0;
    check(ncf_eval_norm(p, rep, &norm));
    std::cout << "norm = " << fmt17(norm) << "\n";
    ncf_rep_free(rep);
    ncf_poly_free(p);
    return 0;
  }

  if (*norm_cmd) {
    ncf_poly* p = nullptr;
    check(ncf_poly_read(no_in.c_str(), &p));
    const std::string spec = no_flags.spec(poly_max_generator(p));
    double max = 0, mean = 0, median = 0;
    check(ncf_proxy_norm(p, spec.c_str(), threads, &max, &mean, &median));
    if (!no_out.empty()) {
      StringOut csv;
      check(ncf_norm_csv(p, spec.c_str(), threads, &csv.value));
      write_file(no_out, csv.value);
    }
    std::cout << "max = " << fmt17(max) << "\nmean = " << fmt17(mean)
              << "\nmedian = " << fmt17(median) << "\n";
    ncf_poly_free(p);
    return 0;
  }

  if (*balance_cmd) {
    ncf_fact* f = nullptr;
    check(ncf_fact_read(ba_in.c_str(), &f));
    const std::string spec = ba_flags.spec(fact_max_generator(f));
    ncf_fact* balanced = nullptr;
    double initial = 0, final_cost = 0, epsilon = 0;
    StringOut report;
    check(ncf_balance(f, spec.c_str(), ba_rounds, ba_tol, ba_no_similarity ? 0 : 1, threads,
                      &balanced, &initial, &final_cost, &epsilon, &report.value));
    check(ncf_fact_write(balanced, ba_out.c_str()));
    if (!ba_report.empty()) write_file(ba_report, report.value);
    std::cout << "m = " << ncf_fact_length(balanced) << "\n"
              << "initial_cost = " << fmt17(initial) << "\n"
              << "final_cost = " << fmt17(final_cost) << "\n"
              << "achieved_epsilon = " << fmt17(epsilon) << "\n";
    ncf_fact_free(balanced);
    ncf_fact_free(f);
    return 0;
  }

  if (*probe_cmd) {
    StringOut csv;
    check(ncf_probe_m(pm_d, pm_n, pm_eps, pm_seed, pm_count,
                      pm_flags.spec(std::max(2, pm_flags.gens)).c_str(), pm_rounds, pm_tol,
                      threads, &csv.value));
    write_file(pm_out, csv.value);
    std::cout << "instances = " << pm_count << "\n";
    return 0;
  }

  if (*transfer_cmd) {
    ncf_poly* p = nullptr;
    check(ncf_poly_read(tr_poly.c_str(), &p));
    nlohmann::json cfg;
    cfg["kind"] = tr_kind;
    cfg["sizes"] = parse_size_list(tr_sizes);
    cfg["samples"] = tr_samples;
    cfg["seed"] = tr_seed;
    cfg["self_adjoint"] = tr_sa;
    if (tr_eps > 0.0) cfg["epsilon"] = tr_eps;
    if (!tr_refs.empty()) {
      nlohmann::json refs = nlohmann::json::array();
      std::stringstream ss(tr_refs);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) refs.push_back(std::atof(item.c_str()));
      }
      cfg["references"] = std::move(refs);
    }
    StringOut csv, summary;
    check(ncf_transfer(p, cfg.dump().c_str(), threads, &csv.value, &summary.value));
    write_file(tr_out, csv.value);
    if (!tr_summary.empty()) write_file(tr_summary, summary.value);
    std::cout << summary.value;
    ncf_poly_free(p);
    return 0;
  }

  if (*sample_cmd) {
    const std::string spec = sa_flags.spec(std::max(1, sa_flags.gens));
    nlohmann::json parsed = nlohmann::json::parse(spec);
    const int nsamples = parsed.value("samples", 1);
    const int gens = parsed.value("gen_count", 1);
    nlohmann::json out = nlohmann::json::array();
    for (int s = 0; s < nsamples; ++s) {
      ncf_rep* rep = nullptr;
      check(ncf_rep_sample(spec.c_str(), s, &rep));
      nlohmann::json entry;
      entry["sample"] = s;
      nlohmann::json us;
      for (int j = 1; j <= gens; ++j) {
        double* reim = nullptr;
        int dim = 0;
        check(ncf_rep_unitary(rep, j, &reim, &dim));
        us[std::to_string(j)] = matrix_json(reim, dim, dim);
        ncf_buffer_free(reim);
      }
      entry["unitaries"] = std::move(us);
      out.push_back(std::move(entry));
      ncf_rep_free(rep);
    }
    write_file(sa_out, out.dump(2) + "\n");
    std::cout << "samples = " << nsamples << "\n";
    return 0;
  }

  if (*selftest_cmd) {
    StringOut log;
    const int failures = ncf_selftest(threads, &log.value);
    std::cout << log.value;
    return failures == 0 ? 0 : 3;
  }

  return 0;
}
