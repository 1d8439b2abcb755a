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

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mgsim/algebra.hpp"
#include "mgsim/graph.hpp"

namespace mgsim {

using cplx = std::complex<double>;

/// Largest qubit count accepted by the dense statevector / density-matrix
/// routines.
inline constexpr std::size_t kDenseMaxQubits = 12;

class CapacityError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_dense_size(std::size_t n) {
  if (n == 0 || n > kDenseMaxQubits)
    throw CapacityError("dense routines support 1.." + std::to_string(kDenseMaxQubits) + " qubits, got " +
                        std::to_string(n));
}

/// Statevector over 2^n amplitudes; qubit q (0-based) is bit q of the index.
struct DenseState {
  std::size_t n = 0;
  std::vector<cplx> amp;

  static DenseState basis(const Bits& bits) {
    check_dense_size(bits.size());
    DenseState s{bits.size(), std::vector<cplx>(std::size_t{1} << bits.size(), 0.0)};
    std::size_t idx = 0;
    for (std::size_t q = 0; q < bits.size(); ++q)
      if (bits[q]) idx |= std::size_t{1} << q;
    s.amp[idx] = 1.0;
    return s;
  }

  /// |+>^n
  static DenseState plus(std::size_t n) {
    check_dense_size(n);
    const double a = std::pow(2.0, -0.5 * static_cast<double>(n));
    return {n, std::vector<cplx>(std::size_t{1} << n, a)};
  }

  double norm() const {
    double s = 0;
    for (auto a : amp) s += std::norm(a);
    return std::sqrt(s);
  }
};

/// Row-major 2^n x 2^n complex matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<cplx> data;

  std::size_t dim() const { return std::size_t{1} << n; }
  cplx& operator()(std::size_t r, std::size_t c) { return data[r * dim() + c]; }
  cplx operator()(std::size_t r, std::size_t c) const { return data[r * dim() + c]; }

  static DenseMatrix projector(const DenseState& s) {
    DenseMatrix m{s.n, std::vector<cplx>(s.amp.size() * s.amp.size())};
    for (std::size_t r = 0; r < s.amp.size(); ++r)
      for (std::size_t c = 0; c < s.amp.size(); ++c) m(r, c) = s.amp[r] * std::conj(s.amp[c]);
    return m;
  }

  cplx trace() const {
    cplx t = 0;
    for (std::size_t k = 0; k < dim(); ++k) t += (*this)(k, k);
    return t;
  }
};

/// Bit masks of a Pauli word for n <= 64.
struct PauliMasks {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  cplx scale = 1.0;  // i^(phase + #Y)

  explicit PauliMasks(const PauliString& p) {
    if (p.num_qubits() > 64) throw CapacityError("PauliMasks: more than 64 qubits");
    x = p.xs()[0];
    z = p.zs()[0];
    const int k = (p.phase() + std::popcount(x & z)) & 3;
    static const cplx powers[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    scale = powers[k];
  }

  /// P|b> = scale * (-1)^{popcount(b & z)} |b ^ x>
  std::pair<std::uint64_t, cplx> apply(std::uint64_t b) const {
    const double sgn = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
    return {b ^ x, scale * sgn};
  }
};

/// psi <- exp(i * theta * P) psi for a Hermitian Pauli word P.
inline void apply_pauli_rotation(DenseState& s, const PauliString& p, double theta) {
  if (p.num_qubits() != s.n) throw std::invalid_argument("apply_pauli_rotation: size mismatch");
  const PauliMasks m(p);
  const double c = std::cos(theta), sn = std::sin(theta);
  std::vector<cplx> out(s.amp.size());
  for (std::uint64_t b = 0; b < s.amp.size(); ++b) {
    auto [to, f] = m.apply(b);
    out[b] += c * s.amp[b];
    out[to] += cplx(0, sn) * f * s.amp[b];
  }
  s.amp = std::move(out);
}

/// Tr[P rho].
inline cplx pauli_trace(const DenseMatrix& rho, const PauliString& p) {
  const PauliMasks m(p);
  cplx t = 0;
  // Tr[P rho] = sum_b <b|P rho|b> = sum_b sum_c P_{b,c} rho_{c,b}, with
  // P_{b^x, b} the only nonzero entry in column b.
  for (std::uint64_t c = 0; c < rho.dim(); ++c) {
    auto [b, f] = m.apply(c);
    t += f * rho(c, b);
  }
  return t;
}

/// Diagonal Hamiltonian in the computational basis (Ising-type).
struct DiagonalHamiltonian {
  std::size_t n = 0;
  std::vector<double> diag;

  double expectation(const DenseState& s) const {
    double e = 0;
    for (std::size_t k = 0; k < diag.size(); ++k) e += diag[k] * std::norm(s.amp[k]);
    return e;
  }
};

inline DiagonalHamiltonian maxcut_hamiltonian(const Graph& g) {
  check_dense_size(g.n_vertices);
  DiagonalHamiltonian h{g.n_vertices, std::vector<double>(std::size_t{1} << g.n_vertices, 0.0)};
  for (std::uint64_t b = 0; b < h.diag.size(); ++b) {
    double e = 0;
    for (const auto& edge : g.edges) {
      const bool same = ((b >> (edge.u - 1)) & 1) == ((b >> (edge.v - 1)) & 1);
      e += same ? static_cast<double>(edge.weight) : -static_cast<double>(edge.weight);
    }
    h.diag[b] = e;
  }
  return h;
}

/// H + sum_i eps_i Z_i with eps_i = 2^-(i+3). Distinct powers of two make
/// every Z-field energy distinct, so the ground state is unique.
inline DiagonalHamiltonian symmetry_broken_maxcut(const Graph& g) {
  DiagonalHamiltonian h = maxcut_hamiltonian(g);
  for (std::uint64_t b = 0; b < h.diag.size(); ++b)
    for (std::size_t i = 0; i < h.n; ++i) {
      const double eps = std::ldexp(1.0, -static_cast<int>(i + 3));
      h.diag[b] += ((b >> i) & 1) ? -eps : eps;
    }
  return h;
}

}  // namespace mgsim
