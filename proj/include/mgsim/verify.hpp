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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mgsim/circuit.hpp"
#include "mgsim/combinadic.hpp"
#include "mgsim/dense.hpp"
#include "mgsim/graph.hpp"
#include "mgsim/modspace.hpp"
#include "mgsim/random.hpp"

namespace mgsim {

inline constexpr std::uint32_t kBruteForceMaxVertices = 30;

/// Ground and first excited levels of sum w_ij z_i z_j.
struct Spectrum {
  double E_g = 0;
  std::optional<double> E_1;  // absent when every assignment is optimal
  std::vector<Bits> ground_bits;  // first `ground_cap` optimal strings, ascending
  std::uint64_t degeneracy = 0;

  std::int64_t optimal_cut(const Graph& g) const {
    return (g.total_weight() - static_cast<std::int64_t>(std::llround(E_g))) / 2;
  }
};

/// Exhaustive Gray-code enumeration; each step flips one vertex and updates
/// the energy from its neighbourhood.
inline Spectrum brute_force_maxcut(const Graph& g, std::size_t ground_cap = 4096) {
  const std::uint32_t n = g.n_vertices;
  if (n == 0) throw std::invalid_argument("brute_force_maxcut: empty graph");
  if (n > kBruteForceMaxVertices)
    throw CapacityError("brute_force_maxcut supports up to " + std::to_string(kBruteForceMaxVertices) + " vertices");
  std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.u - 1].emplace_back(e.v - 1, e.weight);
    adj[e.v - 1].emplace_back(e.u - 1, e.weight);
  }
  std::vector<std::int8_t> z(n, 1);
  std::int64_t energy = g.total_weight();
  std::int64_t best = energy, second = std::numeric_limits<std::int64_t>::max();
  std::vector<std::uint64_t> ground{0};
  std::uint64_t degeneracy = 1;
  std::uint64_t code = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto v = static_cast<std::uint32_t>(std::countr_zero(k));
    std::int64_t local = 0;
    for (auto [u, w] : adj[v]) local += w * z[u];
    energy -= 2 * z[v] * local;
    z[v] = static_cast<std::int8_t>(-z[v]);
    code ^= std::uint64_t{1} << v;
    if (energy < best) {
      second = best;
      best = energy;
      ground.assign(1, code);
      degeneracy = 1;
    } else if (energy == best) {
      ++degeneracy;
      if (ground.size() < ground_cap) ground.push_back(code);
    } else if (energy < second) {
      second = energy;
    }
  }
  Spectrum s;
  s.E_g = static_cast<double>(best);
  if (second != std::numeric_limits<std::int64_t>::max()) s.E_1 = static_cast<double>(second);
  s.degeneracy = degeneracy;
  std::sort(ground.begin(), ground.end());
  for (auto c : ground) {
    Bits b(n);
    for (std::uint32_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>((c >> i) & 1);
    s.ground_bits.push_back(std::move(b));
  }
  return s;
}

/// Statevector evolution through the gate list, gate q = exp(i theta_q gamma_q).
inline DenseState dense_evolve(const Circuit& c, std::span<const double> theta, DenseState s) {
  if (s.n != c.n) throw std::invalid_argument("dense_evolve: state size differs from circuit");
  if (theta.size() != c.gates.size()) throw std::invalid_argument("dense_evolve: theta length mismatch");
  for (std::size_t q = 0; q < c.gates.size(); ++q)
    apply_pauli_rotation(s, generator_pauli(c.gates[q].kind, c.gates[q].site, c.n), theta[q]);
  return s;
}

inline double dense_expectation(const Circuit& c, std::span<const double> theta, const DenseState& init,
                                const DiagonalHamiltonian& h) {
  check_dense_size(c.n);
  if (h.n != c.n) throw std::invalid_argument("dense_expectation: Hamiltonian size differs from circuit");
  return h.expectation(dense_evolve(c, theta, init));
}

class DegenerateGround : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DiagonalSpectrum {
  double E_g = 0;
  double E_1 = 0;
  std::uint64_t ground_index = 0;
};

/// Requires a unique minimum of the diagonal.
inline DiagonalSpectrum diagonal_spectrum(const DiagonalHamiltonian& h) {
  DiagonalSpectrum s;
  s.E_g = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::uint64_t k = 0; k < h.diag.size(); ++k) {
    if (h.diag[k] < s.E_g) {
      s.E_g = h.diag[k];
      s.ground_index = k;
      count = 1;
    } else if (h.diag[k] == s.E_g) {
      ++count;
    }
  }
  if (count != 1) throw DegenerateGround("Hamiltonian ground state is degenerate");
  s.E_1 = std::numeric_limits<double>::infinity();
  for (double e : h.diag)
    if (e > s.E_g) s.E_1 = std::min(s.E_1, e);
  return s;
}

struct ReachabilityReport {
  double pi_g = 0;
  double bound = 0;
  double E_g = 0;
  double E_1 = 0;
  double min_sampled_cost = 0;
  std::vector<double> weights_initial;
  std::vector<double> weights_ground;
  bool weights_match = false;  // all grades equal to `weight_tol`
  bool bound_holds = false;    // min_sampled_cost >= bound - 1e-9
};

/// Samples uniform angles for a seeded ansatz and compares the lowest dense
/// cost against E_g pi_g + E_1 (1 - pi_g), with
/// pi_g = sum_kappa ||rho^g_kappa|| ||rho^i_kappa||.
inline ReachabilityReport reachability_check(const DiagonalHamiltonian& h, const DenseState& init, std::size_t samples,
                                             std::uint64_t seed, double weight_tol = 1e-12) {
  check_dense_size(h.n);
  if (init.n != h.n) throw std::invalid_argument("reachability_check: size mismatch");
  const DiagonalSpectrum spec = diagonal_spectrum(h);
  Bits ground_bits(h.n);
  for (std::size_t i = 0; i < h.n; ++i) ground_bits[i] = static_cast<std::uint8_t>((spec.ground_index >> i) & 1);

  ReachabilityReport r;
  r.E_g = spec.E_g;
  r.E_1 = spec.E_1;
  r.weights_initial = module_weights_dense(init);
  r.weights_ground = module_weights_dense(DenseState::basis(ground_bits));
  r.weights_match = true;
  for (std::size_t k = 0; k < r.weights_initial.size(); ++k) {
    r.pi_g += r.weights_initial[k] * r.weights_ground[k];
    if (std::abs(r.weights_initial[k] - r.weights_ground[k]) > weight_tol) r.weights_match = false;
  }
  r.bound = r.E_g * r.pi_g + r.E_1 * (1 - r.pi_g);

  Rng rng(seed);
  const Circuit c = build_ansatz(static_cast<std::uint32_t>(h.n), rng.next_u64());
  std::vector<double> theta(c.gates.size());
  r.min_sampled_cost = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& t : theta) t = rng.uniform(-std::numbers::pi, std::numbers::pi);
    r.min_sampled_cost = std::min(r.min_sampled_cost, dense_expectation(c, theta, init, h));
  }
  r.bound_holds = r.min_sampled_cost >= r.bound - 1e-9;
  return r;
}

/// Closed-form module weights of any computational basis state:
/// ||rho_{2m}||^2 = C(n, m) 2^-n, odd grades vanish.
inline std::vector<double> basis_state_weights(std::uint32_t n) {
  std::vector<double> w(2 * n + 1, 0.0);
  for (std::uint32_t m = 0; m <= n; ++m)
    w[2 * m] = std::sqrt(static_cast<double>(binomial(n, m)) * std::ldexp(1.0, -static_cast<int>(n)));
  return w;
}

struct RemarkReport {
  bool passed = true;
  double max_pair_deviation = 0;
  double max_closed_form_deviation = 0;
  std::size_t pairs = 0;
};

/// Draws random pairs of computational basis states and checks that their
/// per-grade weights agree with each other and with the closed form.
inline RemarkReport remark_check(std::uint32_t n, std::size_t trials, std::uint64_t seed, double tol = 1e-12) {
  if (n == 0 || n > 10) throw CapacityError("remark_check supports 1..10 qubits");
  Rng rng(seed);
  const std::vector<double> closed = basis_state_weights(n);
  RemarkReport r;
  auto random_bits = [&] {
    Bits b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(2));
    return b;
  };
  for (std::size_t t = 0; t < trials; ++t) {
    const auto wa = module_weights_dense(DenseState::basis(random_bits()));
    const auto wb = module_weights_dense(DenseState::basis(random_bits()));
    for (std::size_t k = 0; k < wa.size(); ++k) {
      r.max_pair_deviation = std::max(r.max_pair_deviation, std::abs(wa[k] - wb[k]));
      r.max_closed_form_deviation =
          std::max({r.max_closed_form_deviation, std::abs(wa[k] - closed[k]), std::abs(wb[k] - closed[k])});
    }
    ++r.pairs;
  }
  r.passed = r.max_pair_deviation <= tol && r.max_closed_form_deviation <= tol;
  return r;
}

}  // namespace mgsim
