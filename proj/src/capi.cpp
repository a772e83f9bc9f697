// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/ncfact.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ncfact/balancer.hpp"
#include "ncfact/errors.hpp"
#include "ncfact/format.hpp"
#include "ncfact/harness.hpp"
#include "ncfact/json_io.hpp"
#include "ncfact/selftest.hpp"

using namespace ncfact;

struct ncf_poly {
  MatPoly value;
};
struct ncf_fact {
  Factorization value;
};
struct ncf_rep {
  Representation value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
ncf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return NCF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    switch (e.code()) {
      case ErrorCode::input: return NCF_ERR_INPUT;
      case ErrorCode::verify: return NCF_ERR_VERIFY;
      case ErrorCode::convergence: return NCF_ERR_CONVERGENCE;
      case ErrorCode::internal: return NCF_ERR_INTERNAL;
    }
    return NCF_ERR_INTERNAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return NCF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NCF_ERR_INTERNAL;
  }
}

ncf_status require(bool cond, const char* msg) {
  if (cond) return NCF_OK;
  g_last_error = msg;
  return NCF_ERR_INPUT;
}

ScalarMatrix matrix_from_buffer(const double* reim, int rows, int cols) {
  if (reim == nullptr || rows < 1 || cols < 1) {
    throw InputError("matrix buffer must be non-null with positive shape");
  }
  ScalarMatrix m(rows, cols);
  std::size_t k = 0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = Complex(reim[k], reim[k + 1]);
      k += 2;
    }
  }
  return m;
}

EnsembleSpec ensemble_from_text(const char* text) {
  if (text == nullptr) throw InputError("ensemble spec is null");
  return ensemble_from_json(parse_json_text(text, "ensemble spec"));
}

}  // namespace

extern "C" {

const char* ncf_version(void) { return "0.1.0"; }

const char* ncf_last_error(void) { return g_last_error.c_str(); }

void ncf_string_free(char* s) { delete[] s; }

void ncf_buffer_free(double* buf) { delete[] buf; }

ncf_status ncf_word_canonical(const char* text, int max_gen, char** out) {
  if (auto rc = require(text != nullptr && out != nullptr, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] {
    Word w = parse_word(text, max_gen <= 0 ? kDefaultMaxGenerator : max_gen);
    *out = dup_string(format_word(w));
  });
}

ncf_status ncf_poly_from_json(const char* text, ncf_poly** out) {
  if (auto rc = require(text != nullptr && out != nullptr, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] {
    *out = new ncf_poly{poly_from_json(parse_json_text(text, "polynomial"))};
  });
}

ncf_status ncf_poly_read(const char* path, ncf_poly** out) {
  if (auto rc = require(path != nullptr && out != nullptr, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] {
    *out = new ncf_poly{poly_from_json(parse_json_text(read_text_file(path), path))};
  });
}

ncf_status ncf_poly_to_json(const ncf_poly* p, char** out) {
  if (auto rc = require(p != nullptr && out != nullptr, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] { *out = dup_string(poly_to_json(p->value).dump(2)); });
}

ncf_status ncf_poly_write(const ncf_poly* p, const char* path) {
  if (auto rc = require(p != nullptr && path != nullptr, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] { write_text_file(path, poly_to_json(p->value).dump(2) + "\n"); });
}

void ncf_poly_free(ncf_poly* p) { delete p; }

int ncf_poly_rows(const ncf_poly* p) { return p ? static_cast<int>(p->value.rows()) : 0; }
int ncf_poly_cols(const ncf_poly* p) { return p ? static_cast<int>(p->value.cols()) : 0; }
int ncf_poly_degree(const ncf_poly* p) {
  return p ? static_cast<int>(p->value.degree()) : 0;
}
size_t ncf_poly_term_count(const ncf_poly* p) { return p ? p->value.term_count() : 0; }

ncf_status ncf_poly_zero(int rows, int cols, ncf_poly** out) {
  if (auto rc = require(out != nullptr, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_poly{MatPoly(rows, cols)}; });
}

ncf_status ncf_poly_add_term(ncf_poly* p, const char* word, const double* coeff_reim) {
  if (auto rc = require(p != nullptr && word != nullptr && coeff_reim != nullptr,
                        "null argument");
      rc != NCF_OK)
    return rc;
  return guarded([&] {
    Word w = parse_word(word);
    ScalarMatrix c = matrix_from_buffer(coeff_reim, static_cast<int>(p->value.rows()),
                                        static_cast<int>(p->value.cols()));
    p->value = p->value.add(MatPoly::from_term(w, c));
  });
}

ncf_status ncf_poly_add(const ncf_poly* a, const ncf_poly* b, ncf_poly** out) {
  if (auto rc = require(a && b && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_poly{a->value.add(b->value)}; });
}

ncf_status ncf_poly_matmul(const ncf_poly* a, const ncf_poly* b, ncf_poly** out) {
  if (auto rc = require(a && b && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_poly{a->value.matmul(b->value)}; });
}

ncf_status ncf_poly_adjoint(const ncf_poly* p, ncf_poly** out) {
  if (auto rc = require(p && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_poly{p->value.adjoint()}; });
}

ncf_status ncf_poly_direct_sum(const ncf_poly* a, const ncf_poly* b, ncf_poly** out) {
  if (auto rc = require(a && b && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_poly{a->value.direct_sum(b->value)}; });
}

ncf_status ncf_poly_scale(const ncf_poly* p, const double* left_reim, int lr, int lc,
                          const double* right_reim, int rr, int rc, ncf_poly** out) {
  if (auto rc0 = require(p && left_reim && right_reim && out, "null argument");
      rc0 != NCF_OK)
    return rc0;
  return guarded([&] {
    *out = new ncf_poly{p->value.scale(matrix_from_buffer(left_reim, lr, lc),
                                       matrix_from_buffer(right_reim, rr, rc))};
  });
}

ncf_status ncf_poly_max_abs_diff(const ncf_poly* a, const ncf_poly* b, double* out) {
  if (auto rc = require(a && b && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = max_abs_diff(a->value, b->value); });
}

ncf_status ncf_factor(const ncf_poly* p, ncf_fact** out) {
  if (auto rc = require(p && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_fact{factor(p->value)}; });
}

ncf_status ncf_fact_from_json(const char* text, ncf_fact** out) {
  if (auto rc = require(text && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] {
    *out = new ncf_fact{fact_from_json(parse_json_text(text, "factorization"))};
  });
}

ncf_status ncf_fact_read(const char* path, ncf_fact** out) {
  if (auto rc = require(path && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] {
    *out = new ncf_fact{fact_from_json(parse_json_text(read_text_file(path), path))};
  });
}

ncf_status ncf_fact_to_json(const ncf_fact* f, char** out) {
  if (auto rc = require(f && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = dup_string(fact_to_json(f->value).dump(2)); });
}

ncf_status ncf_fact_write(const ncf_fact* f, const char* path) {
  if (auto rc = require(f && path, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { write_text_file(path, fact_to_json(f->value).dump(2) + "\n"); });
}

void ncf_fact_free(ncf_fact* f) { delete f; }

int ncf_fact_length(const ncf_fact* f) { return f ? f->value.length() : 0; }

double ncf_fact_cost(const ncf_fact* f) { return f ? cost(f->value) : 0.0; }

ncf_status ncf_fact_expand(const ncf_fact* f, ncf_poly** out) {
  if (auto rc = require(f && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_poly{expand(f->value)}; });
}

ncf_status ncf_fact_single_blockify(const ncf_fact* f, ncf_fact** out) {
  if (auto rc = require(f && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_fact{single_blockify(f->value)}; });
}

ncf_status ncf_fact_equalize_sizes(const ncf_fact* f, ncf_fact** out) {
  if (auto rc = require(f && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_fact{equalize_sizes(f->value)}; });
}

ncf_status ncf_fact_equalize_length(const ncf_fact* f, int target_m, ncf_fact** out) {
  if (auto rc = require(f && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_fact{equalize_length(f->value, target_m)}; });
}

ncf_status ncf_fact_absorb(const ncf_fact* f, ncf_poly*** out_factors, size_t* out_count) {
  if (auto rc = require(f && out_factors && out_count, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] {
    std::vector<MatPoly> chain = absorb_scalars(f->value);
    ncf_poly** arr = new ncf_poly*[chain.size()];
    for (std::size_t i = 0; i < chain.size(); ++i) arr[i] = new ncf_poly{std::move(chain[i])};
    *out_factors = arr;
    *out_count = chain.size();
  });
}

void ncf_poly_array_free(ncf_poly** arr, size_t count) {
  if (!arr) return;
  for (size_t i = 0; i < count; ++i) delete arr[i];
  delete[] arr;
}

ncf_status ncf_rep_sample(const char* ensemble_json, int sample_index, ncf_rep** out) {
  if (auto rc = require(ensemble_json && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] {
    *out = new ncf_rep{sample_representation(ensemble_from_text(ensemble_json), sample_index)};
  });
}

ncf_status ncf_rep_shift(int dim, int gen_count, ncf_rep** out) {
  if (auto rc = require(out != nullptr, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = new ncf_rep{shift_representation(dim, gen_count)}; });
}

void ncf_rep_free(ncf_rep* r) { delete r; }

int ncf_rep_dim(const ncf_rep* r) { return r ? static_cast<int>(r->value.dim) : 0; }

ncf_status ncf_rep_unitary(const ncf_rep* r, int gen_index, double** out_reim,
                           int* out_dim) {
  if (auto rc = require(r && out_reim && out_dim, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] {
    auto it = r->value.unitaries.find(gen_index);
    if (it == r->value.unitaries.end()) {
      throw InputError("no unitary assigned to generator x" + std::to_string(gen_index));
    }
    const ScalarMatrix& m = it->second;
    double* buf = new double[2 * static_cast<std::size_t>(m.size())];
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        buf[k++] = m(i, j).real();
        buf[k++] = m(i, j).imag();
      }
    }
    *out_reim = buf;
    *out_dim = static_cast<int>(m.rows());
  });
}

ncf_status ncf_eval(const ncf_poly* p, const ncf_rep* r, double** out_reim, int* out_rows,
                    int* out_cols) {
  if (auto rc = require(p && r && out_reim && out_rows && out_cols, "null argument");
      rc != NCF_OK)
    return rc;
  return guarded([&] {
    ScalarMatrix m = eval(p->value, r->value);
    double* buf = new double[2 * static_cast<std::size_t>(m.size())];
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        buf[k++] = m(i, j).real();
        buf[k++] = m(i, j).imag();
      }
    }
    *out_reim = buf;
    *out_rows = static_cast<int>(m.rows());
    *out_cols = static_cast<int>(m.cols());
  });
}

ncf_status ncf_eval_norm(const ncf_poly* p, const ncf_rep* r, double* out) {
  if (auto rc = require(p && r && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] { *out = eval_norm(p->value, r->value).value; });
}

ncf_status ncf_proxy_norm(const ncf_poly* p, const char* ensemble_json, int threads,
                          double* out_max, double* out_mean, double* out_median) {
  if (auto rc = require(p && ensemble_json && out_max && out_mean && out_median,
                        "null argument");
      rc != NCF_OK)
    return rc;
  return guarded([&] {
    NormSummary s = proxy_norm(p->value, ensemble_from_text(ensemble_json), threads);
    *out_max = s.max;
    *out_mean = s.mean;
    *out_median = s.median;
  });
}

ncf_status ncf_norm_csv(const ncf_poly* p, const char* ensemble_json, int threads,
                        char** out_csv) {
  if (auto rc = require(p && ensemble_json && out_csv, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] {
    EnsembleSpec spec = ensemble_from_text(ensemble_json);
    NormSummary s = proxy_norm(p->value, spec, threads);
    std::string csv = "kind,N,sample_index,norm\n";
    for (std::size_t i = 0; i < s.per_sample.size(); ++i) {
      csv += ensemble_kind_name(spec.kind) + ',' + std::to_string(spec.dim) + ',' +
             std::to_string(i) + ',' + fmt_double(s.per_sample[i]) + '\n';
    }
    *out_csv = dup_string(csv);
  });
}

ncf_status ncf_balance(const ncf_fact* f, const char* ensemble_json, int max_rounds,
                       double tolerance, int similarity, int threads, ncf_fact** out,
                       double* out_initial_cost, double* out_final_cost,
                       double* out_epsilon, char** report_csv) {
  if (auto rc = require(f && ensemble_json && out, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] {
    BalanceConfig cfg;
    cfg.ensemble = ensemble_from_text(ensemble_json);
    cfg.max_rounds = max_rounds;
    cfg.tolerance = tolerance;
    cfg.similarity_search = similarity != 0;
    cfg.threads = threads;
    auto [balanced, report] = balance(f->value, cfg);
    *out = new ncf_fact{std::move(balanced)};
    if (out_initial_cost) *out_initial_cost = report.initial_cost;
    if (out_final_cost) *out_final_cost = report.final_cost;
    if (out_epsilon) *out_epsilon = report.achieved_epsilon;
    if (report_csv) {
      std::string csv = "round,cost\n";
      for (std::size_t i = 0; i < report.round_costs.size(); ++i) {
        csv += std::to_string(i) + ',' + fmt_double(report.round_costs[i]) + '\n';
      }
      *report_csv = dup_string(csv);
    }
  });
}

ncf_status ncf_probe_m(int d, int n, double eps, uint64_t seed, int count,
                       const char* ensemble_json, int max_rounds, double tolerance,
                       int threads, char** out_csv) {
  if (auto rc = require(ensemble_json && out_csv, "null argument"); rc != NCF_OK) return rc;
  return guarded([&] {
    auto rows = probe_m(d, n, eps, seed, count, ensemble_from_text(ensemble_json), threads,
                        max_rounds, tolerance);
    *out_csv = dup_string(probe_table_csv(rows));
  });
}

ncf_status ncf_transfer(const ncf_poly* p, const char* config_json, int threads,
                        char** out_csv, char** summary_csv) {
  if (auto rc = require(p && config_json && out_csv, "null argument"); rc != NCF_OK)
    return rc;
  return guarded([&] {
    Json j = parse_json_text(config_json, "transfer config");
    TransferConfig cfg;
    cfg.polynomial = p->value;
    if (!j.contains("kind") || !j["kind"].is_string()) {
      throw InputError("transfer config needs a string 'kind'");
    }
    cfg.kind = ensemble_kind_from_name(j["kind"].get<std::string>());
    if (!j.contains("sizes") || !j["sizes"].is_array() || j["sizes"].empty()) {
      throw InputError("transfer config needs a non-empty 'sizes' array");
    }
    for (const Json& s : j["sizes"]) {
      if (!s.is_number_integer()) throw InputError("transfer sizes must be integers");
      cfg.sizes.push_back(s.get<int>());
    }
    if (j.contains("samples")) cfg.samples_per_size = j["samples"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("self_adjoint")) cfg.self_adjoint_mode = j["self_adjoint"].get<bool>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("references")) {
      std::vector<double> refs;
      for (const Json& r : j["references"]) refs.push_back(r.get<double>());
      cfg.factor_references = std::move(refs);
    }
    cfg.threads = threads;
    TransferReport report = run_transfer(cfg);
    *out_csv = dup_string(report.csv());
    if (summary_csv) *summary_csv = dup_string(report.summary_csv());
  });
}

int ncf_selftest(int threads, char** out_log) {
  std::ostringstream out;
  int failures = 0;
  try {
    failures = selftest(threads, out);
  } catch (const std::exception& e) {
    out << "selftest: aborted -- " << e.what() << "\n";
    failures = -1;
  }
  if (out_log) *out_log = dup_string(out.str());
  return failures;
}

}  // extern "C"
