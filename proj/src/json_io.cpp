// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/json_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ncfact/errors.hpp"

namespace ncfact {

namespace {

double require_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw InputError(what + " must be a number");
  return j.get<double>();
}

int require_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + " must be an integer");
  return j.get<int>();
}

const Json& require_field(const Json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(what + " is missing field '" + key + "'");
  return *it;
}

}  // namespace

Json matrix_to_json(const ScalarMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ScalarMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& row = j[i];
    if (!row.is_array() || row.empty()) throw InputError("matrix row must be a non-empty array");
    if (i == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw InputError("matrix rows have inconsistent lengths");
    }
  }
  ScalarMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      const Json& entry = j[i][k];
      if (!entry.is_array() || entry.size() != 2) {
        throw InputError("matrix entry must be a [re, im] pair");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          Complex(require_number(entry[0], "matrix entry real part"),
                  require_number(entry[1], "matrix entry imaginary part"));
    }
  }
  return m;
}

Json poly_to_json(const MatPoly& p) {
  Json j;
  j["rows"] = p.rows();
  j["cols"] = p.cols();
  Json terms = Json::array();
  for (const auto& [w, c] : p.terms()) {
    Json term;
    term["word"] = format_word(w);
    term["coeff"] = matrix_to_json(c);
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

MatPoly poly_from_json(const Json& j, int max_gen) {
  if (!j.is_object()) throw InputError("polynomial must be a JSON object");
  const int rows = require_int(require_field(j, "rows", "polynomial"), "rows");
  const int cols = require_int(require_field(j, "cols", "polynomial"), "cols");
  if (rows < 1 || cols < 1) throw InputError("polynomial shape must be positive");
  MatPoly p(rows, cols);
  const Json& terms = require_field(j, "terms", "polynomial");
  if (!terms.is_array()) throw InputError("polynomial 'terms' must be an array");
  for (const Json& term : terms) {
    const Json& wj = require_field(term, "word", "polynomial term");
    if (!wj.is_string()) throw InputError("term 'word' must be a string");
    Word w = parse_word(wj.get<std::string>(), max_gen);
    ScalarMatrix c = matrix_from_json(require_field(term, "coeff", "polynomial term"));
    if (c.rows() != rows || c.cols() != cols) {
      throw InputError("coefficient for word '" + wj.get<std::string>() +
                       "' does not match the polynomial shape");
    }
    // Duplicate words are summed.
    p = p.add(MatPoly::from_term(w, c));
  }
  return p;
}

namespace {

Json block_to_json(const DegreeOneFactor& y) {
  Json j;
  j["size"] = y.size;
  j["a0"] = matrix_to_json(y.a0);
  Json a = Json::object();
  for (const auto& [gen, c] : y.a) a[std::to_string(gen)] = matrix_to_json(c);
  Json b = Json::object();
  for (const auto& [gen, c] : y.b) b[std::to_string(gen)] = matrix_to_json(c);
  j["a"] = std::move(a);
  j["b"] = std::move(b);
  return j;
}

std::map<int, ScalarMatrix> coeff_map_from_json(const Json& j, Eigen::Index size,
                                                int max_gen, const char* what) {
  std::map<int, ScalarMatrix> out;
  if (!j.is_object()) throw InputError(std::string("block '") + what + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    int gen = 0;
    try {
      gen = std::stoi(it.key());
    } catch (const std::exception&) {
      throw InputError(std::string("block '") + what + "' key '" + it.key() +
                       "' is not a generator index");
    }
    if (gen < 1 || gen > max_gen) {
      throw InputError("generator index " + it.key() + " out of range in block");
    }
    ScalarMatrix c = matrix_from_json(it.value());
    if (c.rows() != size || c.cols() != size) {
      throw InputError("block coefficient for generator " + it.key() +
                       " does not match the block size");
    }
    out[gen] = std::move(c);
  }
  return out;
}

DegreeOneFactor block_from_json(const Json& j, int max_gen) {
  DegreeOneFactor y;
  y.size = require_int(require_field(j, "size", "block"), "block size");
  if (y.size < 1) throw InputError("block size must be positive");
  y.a0 = matrix_from_json(require_field(j, "a0", "block"));
  if (y.a0.rows() != y.size || y.a0.cols() != y.size) {
    throw InputError("block a0 does not match the block size");
  }
  if (j.contains("a")) y.a = coeff_map_from_json(j["a"], y.size, max_gen, "a");
  if (j.contains("b")) y.b = coeff_map_from_json(j["b"], y.size, max_gen, "b");
  return y;
}

}  // namespace

Json fact_to_json(const Factorization& f) {
  Json j;
  j["out_rows"] = f.out_rows;
  j["out_cols"] = f.out_cols;
  Json alphas = Json::array();
  for (const auto& alpha : f.alphas) alphas.push_back(matrix_to_json(alpha));
  j["alphas"] = std::move(alphas);
  Json diags = Json::array();
  for (const auto& d : f.diags) {
    Json dj;
    Json blocks = Json::array();
    for (const auto& blk : d.blocks) blocks.push_back(block_to_json(blk));
    dj["blocks"] = std::move(blocks);
    diags.push_back(std::move(dj));
  }
  j["diags"] = std::move(diags);
  j["cost"] = cost(f);
  return j;
}

Factorization fact_from_json(const Json& j, int max_gen) {
  if (!j.is_object()) throw InputError("factorization must be a JSON object");
  Factorization f;
  f.out_rows = require_int(require_field(j, "out_rows", "factorization"), "out_rows");
  f.out_cols = require_int(require_field(j, "out_cols", "factorization"), "out_cols");
  if (f.out_rows < 1 || f.out_cols < 1) {
    throw InputError("factorization output shape must be positive");
  }
  const Json& alphas = require_field(j, "alphas", "factorization");
  if (!alphas.is_array()) throw InputError("factorization 'alphas' must be an array");
  for (const Json& a : alphas) f.alphas.push_back(matrix_from_json(a));
  const Json& diags = require_field(j, "diags", "factorization");
  if (!diags.is_array()) throw InputError("factorization 'diags' must be an array");
  for (const Json& dj : diags) {
    const Json& blocks = require_field(dj, "blocks", "diagonal factor");
    if (!blocks.is_array() || blocks.empty()) {
      throw InputError("diagonal factor must have a non-empty 'blocks' array");
    }
    BlockDiagonal d;
    for (const Json& bj : blocks) d.blocks.push_back(block_from_json(bj, max_gen));
    f.diags.push_back(std::move(d));
  }
  // Structural consistency is a verification concern, not a parse one.
  f.validate();
  return f;
}

Json chain_to_json(const std::vector<MatPoly>& chain, double cost_value) {
  if (chain.empty()) throw InputError("empty factor chain");
  Json j;
  j["out_rows"] = chain.front().rows();
  j["out_cols"] = chain.back().cols();
  Json factors = Json::array();
  for (const auto& p : chain) factors.push_back(poly_to_json(p));
  j["factors"] = std::move(factors);
  j["cost"] = cost_value;
  return j;
}

std::vector<MatPoly> chain_from_json(const Json& j, int max_gen) {
  const Json& factors = require_field(j, "factors", "factor chain");
  if (!factors.is_array() || factors.empty()) {
    throw InputError("factor chain must have a non-empty 'factors' array");
  }
  std::vector<MatPoly> chain;
  for (const Json& p : factors) chain.push_back(poly_from_json(p, max_gen));
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain[i - 1].cols() != chain[i].rows()) {
      throw VerifyError("factor chain shapes do not compose");
    }
  }
  return chain;
}

Json ensemble_to_json(const EnsembleSpec& spec) {
  Json j;
  j["kind"] = ensemble_kind_name(spec.kind);
  j["dim"] = spec.dim;
  j["gen_count"] = spec.gen_count;
  j["seed"] = spec.seed;
  j["samples"] = spec.samples;
  return j;
}

EnsembleSpec ensemble_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("ensemble spec must be a JSON object");
  EnsembleSpec spec;
  const Json& kind = require_field(j, "kind", "ensemble spec");
  if (!kind.is_string()) throw InputError("ensemble 'kind' must be a string");
  spec.kind = ensemble_kind_from_name(kind.get<std::string>());
  spec.dim = require_int(require_field(j, "dim", "ensemble spec"), "dim");
  spec.gen_count = require_int(require_field(j, "gen_count", "ensemble spec"), "gen_count");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw InputError("ensemble 'seed' must be an integer");
    }
    spec.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("samples")) spec.samples = require_int(j["samples"], "samples");
  if (spec.dim < 1) throw InputError("ensemble dim must be >= 1");
  if (spec.gen_count < 1) throw InputError("ensemble gen_count must be >= 1");
  if (spec.samples < 1) throw InputError("ensemble samples must be >= 1");
  return spec;
}

Json parse_json_text(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("failed to parse " + what + " as JSON");
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw InputError("failed while writing '" + path + "'");
}

}  // namespace ncfact
