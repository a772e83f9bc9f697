// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef NCFACT_JSON_IO_HPP
#define NCFACT_JSON_IO_HPP

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ncfact/factorization.hpp"
#include "ncfact/matpoly.hpp"
#include "ncfact/repnorm.hpp"

namespace ncfact {

using Json = nlohmann::json;

// Matrices are encoded as a rows x cols array of [re, im] pairs.
Json matrix_to_json(const ScalarMatrix& m);
ScalarMatrix matrix_from_json(const Json& j);

// { "rows", "cols", "terms": [ { "word", "coeff" } ] }; duplicate words are
// summed on input; terms are emitted in canonical graded-lex order.
Json poly_to_json(const MatPoly& p);
MatPoly poly_from_json(const Json& j, int max_gen = kDefaultMaxGenerator);

// { "out_rows", "out_cols", "alphas": [...], "diags": [ { "blocks": [...] } ],
//   "cost" }; cost is informational on input and recomputed.
Json fact_to_json(const Factorization& f);
Factorization fact_from_json(const Json& j, int max_gen = kDefaultMaxGenerator);

// Degree-<=1 product chain: { "out_rows", "out_cols", "factors": [poly...],
//   "cost" }.
Json chain_to_json(const std::vector<MatPoly>& chain, double cost_value);
std::vector<MatPoly> chain_from_json(const Json& j, int max_gen = kDefaultMaxGenerator);

// { "kind", "dim", "gen_count", "seed", "samples" }.
Json ensemble_to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_from_json(const Json& j);

/// Parses text as JSON, rethrowing parse failures as InputError.
Json parse_json_text(const std::string& text, const std::string& what);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ncfact

#endif  // NCFACT_JSON_IO_HPP
