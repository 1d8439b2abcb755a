// Copyright 2026 The mgsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mgsim/algebra.hpp"
#include "mgsim/combinadic.hpp"
#include "mgsim/dense.hpp"
#include "mgsim/graph.hpp"

namespace mgsim {

/// dim B_kappa = C(2n, kappa).
inline std::uint64_t dim_module(std::uint32_t kappa, std::uint32_t n) { return binomial(2ull * n, kappa); }

/// Basis element of B_kappa: a strictly increasing Majorana tuple and its
/// colex rank.
struct BasisElement {
  std::uint32_t kappa = 0;
  std::vector<std::uint32_t> indices;
  std::uint64_t rank = 0;
};

/// Rank/unrank for one (n, kappa) module.
class ModuleIndex {
 public:
  ModuleIndex(std::uint32_t n, std::uint32_t kappa) : n_(n), kappa_(kappa), table_(2 * n + 1, kappa) {
    if (kappa > 2 * n) throw std::invalid_argument("ModuleIndex: kappa exceeds 2n");
  }

  std::uint32_t n() const { return n_; }
  std::uint32_t kappa() const { return kappa_; }
  std::uint64_t dim() const { return binomial(2ull * n_, kappa_); }

  std::uint64_t rank(std::span<const std::uint32_t> indices) const {
    if (indices.size() != kappa_) throw std::invalid_argument("rank: tuple length differs from kappa");
    for (auto i : indices)
      if (i >= 2 * n_) throw std::invalid_argument("rank: Majorana index out of range");
    return table_.rank(indices);
  }

  std::vector<std::uint32_t> unrank(std::uint64_t r) const {
    if (r >= dim()) throw std::out_of_range("unrank: rank out of range");
    return table_.unrank(r, kappa_);
  }

  BasisElement element(std::uint64_t r) const { return {kappa_, unrank(r), r}; }

 private:
  std::uint32_t n_;
  std::uint32_t kappa_;
  BinomialTable table_;
};

inline std::uint64_t rank(std::span<const std::uint32_t> indices, std::uint32_t kappa, std::uint32_t n) {
  return ModuleIndex(n, kappa).rank(indices);
}

inline std::vector<std::uint32_t> unrank(std::uint64_t r, std::uint32_t kappa, std::uint32_t n) {
  return ModuleIndex(n, kappa).unrank(r);
}

/// Exponent s such that i^s * (ordered Majorana product) is the Hermitian
/// Pauli word with phase +1. Basis operators are that word over 2^{n/2}.
inline std::uint8_t basis_phase_convention(std::span<const std::uint32_t> indices, std::uint32_t n) {
  if (indices.empty()) return 0;
  PauliString p = majorana_product(indices, n);
  return static_cast<std::uint8_t>((4 - p.phase()) & 3);
}

inline std::uint8_t basis_phase_convention(const BasisElement& e, std::uint32_t n) {
  return basis_phase_convention(e.indices, n);
}

/// Unnormalized basis operator (phase-stripped Pauli word) of the element.
inline PauliString basis_pauli(std::span<const std::uint32_t> indices, std::uint32_t n) {
  PauliString p = indices.empty() ? PauliString(n) : majorana_product(indices, n);
  p.set_phase(0);
  return p;
}

/// Real coefficients of an operator restricted to B_kappa in the normalized
/// basis; the Euclidean norm equals the Hilbert-Schmidt norm.
struct ModuleVector {
  std::uint32_t n = 0;
  std::uint32_t kappa = 0;
  std::vector<double> coeffs;

  ModuleVector() = default;
  ModuleVector(std::uint32_t n_, std::uint32_t kappa_) : n(n_), kappa(kappa_), coeffs(dim_module(kappa_, n_), 0.0) {}

  double norm() const {
    double s = 0;
    for (double c : coeffs) s += c * c;
    return std::sqrt(s);
  }

  double dot(const ModuleVector& o) const {
    if (o.n != n || o.kappa != kappa) throw std::invalid_argument("ModuleVector: module mismatch");
    double s = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) s += coeffs[k] * o.coeffs[k];
    return s;
  }
};

/// Majorana tuple {2i, 2i+1, 2j, 2j+1, ...} for a sorted list of 0-based
/// sites; its basis operator is the Z word on those sites.
inline std::vector<std::uint32_t> z_word_indices(std::span<const std::uint32_t> sites) {
  std::vector<std::uint32_t> out;
  out.reserve(2 * sites.size());
  for (auto s : sites) {
    out.push_back(2 * s);
    out.push_back(2 * s + 1);
  }
  return out;
}

/// Coefficients Tr[b_l rho] of a computational basis state in B_kappa.
/// Only Z-words contribute; each such entry is +-2^{-n/2}.
inline ModuleVector project_basis_state(const Bits& bits, std::uint32_t kappa) {
  const auto n = static_cast<std::uint32_t>(bits.size());
  if (n == 0) throw std::invalid_argument("project_basis_state: empty bitstring");
  if (kappa % 2 != 0) throw std::invalid_argument("project_basis_state: kappa must be even");
  if (kappa > 2 * n) throw std::invalid_argument("project_basis_state: kappa exceeds 2n");
  ModuleVector v(n, kappa);
  const ModuleIndex index(n, kappa);
  const double mag = std::pow(2.0, -0.5 * n);
  const std::uint32_t m = kappa / 2;
  std::vector<std::uint32_t> sites(m);
  for (std::uint32_t k = 0; k < m; ++k) sites[k] = k;
  do {
    int sign = 1;
    for (auto s : sites)
      if (bits[s]) sign = -sign;
    v.coeffs[index.rank(z_word_indices(sites))] = sign * mag;
  } while (m > 0 && next_colex(sites, n));
  return v;
}

/// H_MaxCut = sum w_ij Z_i Z_j in the normalized B_4 basis: weight * 2^{n/2}
/// at the rank of {2i, 2i+1, 2j, 2j+1}.
inline ModuleVector project_maxcut(const Graph& g) {
  if (g.n_vertices < 2) throw std::invalid_argument("project_maxcut: need at least 2 vertices");
  ModuleVector v(g.n_vertices, 4);
  const ModuleIndex index(g.n_vertices, 4);
  const double scale = std::pow(2.0, 0.5 * g.n_vertices);
  for (const auto& e : g.edges) {
    const std::uint32_t sites[] = {e.u - 1, e.v - 1};
    v.coeffs[index.rank(z_word_indices(sites))] += static_cast<double>(e.weight) * scale;
  }
  return v;
}

/// Hilbert-Schmidt norm of the projection of a dense density matrix onto
/// every B_kappa, kappa = 0..2n. Enumerates all 4^n Pauli words.
inline std::vector<double> module_weights_dense(const DenseMatrix& rho) {
  const std::size_t n = rho.n;
  check_dense_size(n);
  const cplx tr = rho.trace();
  if (std::abs(tr - 1.0) > 1e-9) throw std::invalid_argument("module_weights_dense: state is not normalized");
  std::vector<double> sq(2 * n + 1, 0.0);
  const double inv_dim = std::ldexp(1.0, -static_cast<int>(n));
  PauliString p(n);
  const std::uint64_t dim = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t z = 0; z < dim; ++z) {
      for (std::size_t q = 0; q < n; ++q)
        p.set(q, static_cast<Pauli>(((x >> q) & 1) | (((z >> q) & 1) << 1)));
      const cplx t = pauli_trace(rho, p);
      const std::size_t grade = majorana_grade(p);
      sq[grade] += std::norm(t) * inv_dim;
    }
  }
  std::vector<double> out(sq.size());
  for (std::size_t k = 0; k < sq.size(); ++k) out[k] = std::sqrt(sq[k]);
  return out;
}

inline std::vector<double> module_weights_dense(const DenseState& s) {
  return module_weights_dense(DenseMatrix::projector(s));
}

}  // namespace mgsim
