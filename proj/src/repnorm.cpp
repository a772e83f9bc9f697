// Part of the ncfact project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "ncfact/repnorm.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncfact/errors.hpp"
#include "ncfact/parallel.hpp"

namespace ncfact {

Representation make_representation(Eigen::Index dim, std::map<int, ScalarMatrix> unitaries,
                                   std::string label) {
  for (const auto& [j, u] : unitaries) {
    if (u.rows() != dim || u.cols() != dim) {
      throw InputError("representation matrix for generator " + std::to_string(j) +
                       " has wrong shape");
    }
    if (!is_unitary_within(u, kUnitarityTol)) {
      throw VerifyError("matrix for generator " + std::to_string(j) +
                        " fails the unitarity check in representation '" + label + "'");
    }
  }
  return Representation{dim, std::move(unitaries), std::move(label)};
}

std::string ensemble_kind_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::haar_unitary: return "haar_unitary";
    case EnsembleKind::uniform_permutation: return "uniform_permutation";
    case EnsembleKind::circulant_shift: return "circulant_shift";
  }
  return "unknown";
}

EnsembleKind ensemble_kind_from_name(const std::string& name) {
  if (name == "haar_unitary" || name == "haar") return EnsembleKind::haar_unitary;
  if (name == "uniform_permutation" || name == "permutation") {
    return EnsembleKind::uniform_permutation;
  }
  if (name == "circulant_shift" || name == "shift") return EnsembleKind::circulant_shift;
  throw InputError("unknown ensemble kind '" + name + "'");
}

ScalarMatrix haar_unitary(Eigen::Index n, RandomStream& stream) {
  ScalarMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i, j) = stream.complex_normal();
    }
  }
  Eigen::HouseholderQR<ScalarMatrix> qr(g);
  ScalarMatrix q = qr.householderQ() * ScalarMatrix::Identity(n, n);
  ScalarMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    Complex d = r(j, j);
    double m = std::abs(d);
    q.col(j) *= (m > 0.0) ? d / m : Complex(1.0, 0.0);
  }
  return q;
}

ScalarMatrix random_permutation_matrix(Eigen::Index n, RandomStream& stream) {
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  for (Eigen::Index i = n - 1; i > 0; --i) {
    auto j = static_cast<Eigen::Index>(stream.uniform_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }
  ScalarMatrix out = ScalarMatrix::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col) out(perm[col], col) = Complex(1.0, 0.0);
  return out;
}

ScalarMatrix circulant_shift_matrix(Eigen::Index n) {
  ScalarMatrix out = ScalarMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) out((j + 1) % n, j) = Complex(1.0, 0.0);
  return out;
}

Representation shift_representation(Eigen::Index n, int gen_count) {
  if (gen_count < 1) throw InputError("shift representation needs gen_count >= 1");
  ScalarMatrix s = circulant_shift_matrix(n);
  std::map<int, ScalarMatrix> us;
  for (int j = 1; j <= gen_count; ++j) us[j] = s;
  return make_representation(n, std::move(us),
                             "circulant_shift[N=" + std::to_string(n) + "]");
}

Representation sample_representation(const EnsembleSpec& spec, int sample_index) {
  if (spec.dim < 1) throw InputError("ensemble dim must be >= 1");
  if (spec.gen_count < 1) throw InputError("ensemble gen_count must be >= 1");
  if (spec.kind == EnsembleKind::circulant_shift) {
    return shift_representation(spec.dim, spec.gen_count);
  }
  std::map<int, ScalarMatrix> us;
  for (int j = 1; j <= spec.gen_count; ++j) {
    RandomStream stream(spec.seed, static_cast<std::uint64_t>(sample_index),
                        static_cast<std::uint64_t>(j));
    us[j] = spec.kind == EnsembleKind::haar_unitary
                ? haar_unitary(spec.dim, stream)
                : random_permutation_matrix(spec.dim, stream);
  }
  std::string label = ensemble_kind_name(spec.kind) + "[N=" + std::to_string(spec.dim) +
                      ",seed=" + std::to_string(spec.seed) +
                      ",sample=" + std::to_string(sample_index) + "]";
  return make_representation(spec.dim, std::move(us), std::move(label));
}

ScalarMatrix eval_word(const Word& w, const Representation& rep) {
  ScalarMatrix acc = ScalarMatrix::Identity(rep.dim, rep.dim);
  for (const auto& letter : w.letters()) {
    auto it = rep.unitaries.find(letter.gen_index);
    if (it == rep.unitaries.end()) {
      throw InputError("no unitary assigned to generator x" +
                       std::to_string(letter.gen_index) + " in representation '" +
                       rep.label + "'");
    }
    if (letter.starred) {
      acc = acc * it->second.adjoint();
    } else {
      acc = acc * it->second;
    }
  }
  return acc;
}

ScalarMatrix eval(const MatPoly& p, const Representation& rep) {
  const Eigen::Index n = rep.dim;
  ScalarMatrix out = ScalarMatrix::Zero(p.rows() * n, p.cols() * n);
  for (const auto& [w, c] : p.terms()) {
    out += kron(c, eval_word(w, rep));
  }
  return out;
}

NormEstimate operator_norm(const ScalarMatrix& a) {
  NormEstimate est;
  if (std::max(a.rows(), a.cols()) <= 1024) {
    est.method = NormMethod::full_svd;
    est.rel_tol = 1e-12;
    est.value = spectral_norm_svd(a);
  } else {
    est.method = NormMethod::power_iteration;
    est.rel_tol = 1e-9;
    est.value = spectral_norm_power(a, est.rel_tol, 10000);
  }
  return est;
}

NormEstimate eval_norm(const MatPoly& p, const Representation& rep) {
  NormEstimate est = operator_norm(eval(p, rep));
  est.representation_label = rep.label;
  return est;
}

NormSummary proxy_norm(const MatPoly& p, const EnsembleSpec& spec, int threads) {
  if (spec.samples < 1) throw InputError("ensemble needs samples >= 1");
  NormSummary summary;
  summary.per_sample.assign(static_cast<std::size_t>(spec.samples), 0.0);
  parallel_for(static_cast<std::size_t>(spec.samples), threads, [&](std::size_t i) {
    Representation rep = sample_representation(spec, static_cast<int>(i));
    summary.per_sample[i] = eval_norm(p, rep).value;
  });
  std::vector<double> sorted = summary.per_sample;
  std::sort(sorted.begin(), sorted.end());
  summary.max = sorted.back();
  summary.mean =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  const std::size_t h = sorted.size() / 2;
  summary.median =
      sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  return summary;
}

}  // namespace ncfact
