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

#include "mgsim/circuit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "kron_oracle.hpp"

using namespace mgsim;
namespace orc = mgsim::oracle;

namespace {

constexpr GeneratorKind kAllKinds[] = {GeneratorKind::Z, GeneratorKind::XX, GeneratorKind::XY, GeneratorKind::YX,
                                       GeneratorKind::YY};

std::vector<double> random_vector(std::size_t d, Rng& rng) {
  std::vector<double> v(d);
  for (auto& x : v) x = rng.uniform(-1, 1);
  return v;
}

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Brute-force table: for each basis word b_l, compute i*gamma*b_l with dense
// matrices and look for the unique basis word it is proportional to.
struct BrutePair {
  std::uint64_t lo, hi;
  double sign;
};

std::vector<BrutePair> brute_pairs(const Generator& gen, std::uint32_t kappa, std::uint32_t n) {
  ModuleIndex idx(n, kappa);
  std::vector<orc::Mat> basis;
  for (std::uint64_t r = 0; r < idx.dim(); ++r) basis.push_back(orc::word_matrix(basis_pauli(idx.unrank(r), n).str()));
  const orc::Mat g = orc::word_matrix(gen.pauli.str());
  std::vector<BrutePair> out;
  for (std::uint64_t l = 0; l < idx.dim(); ++l) {
    const orc::Mat comm = g * basis[l] + orc::cplx(-1) * (basis[l] * g);
    if (orc::max_abs_diff(comm, orc::Mat(comm.dim)) < 1e-12) continue;
    // i*gamma*b = (i/2)[gamma, b] when they anticommute.
    const orc::Mat target = orc::cplx(0, 1) * (g * basis[l]);
    for (std::uint64_t m = 0; m < idx.dim(); ++m) {
      const double d = static_cast<double>(basis[m].dim);
      const orc::cplx c = orc::trace(orc::adjoint(basis[m]) * target) / d;
      if (std::abs(c) > 0.5) {
        EXPECT_NEAR(c.imag(), 0.0, 1e-12);
        if (l < m) out.push_back({l, m, c.real() > 0 ? 1.0 : -1.0});
      }
    }
  }
  return out;
}

}  // namespace

TEST(circuit, generators_are_quadratic_involutions) {
  for (std::uint32_t n = 2; n <= 6; ++n)
    for (auto kind : kAllKinds)
      for (std::uint32_t site = 0; site + (kind == GeneratorKind::Z ? 0 : 1) < n; ++site) {
        const auto gen = Generator::make(kind, site, n);
        EXPECT_EQ((gen.pauli * gen.pauli).str(), PauliString(n).str());
        EXPECT_EQ(majorana_grade(gen.pauli), 2u);
      }
  const auto z1 = Generator::make(GeneratorKind::Z, 0, 2);
  EXPECT_EQ(z1.support[0], 0u);
  EXPECT_EQ(z1.support[1], 1u);
  EXPECT_THROW(Generator::make(GeneratorKind::XX, 2, 3), std::out_of_range);
}

TEST(circuit, build_ansatz_shape) {
  auto c2 = build_ansatz(2, 1);
  EXPECT_EQ(c2.blocks, 2u);
  EXPECT_EQ(c2.num_params(), 6u);
  EXPECT_EQ(c2.gates.size(), 6u);
  EXPECT_EQ(build_ansatz(4, 1).num_params(), 28u);
  for (std::uint32_t n = 2; n <= 9; ++n) {
    const auto c = build_ansatz(n, 3);
    EXPECT_EQ(c.num_params(), static_cast<std::size_t>(n) * (2 * n - 1));
    std::size_t z = 0;
    for (std::size_t q = 0; q < c.gates.size(); ++q) {
      const auto& g = c.gates[q];
      EXPECT_EQ(g.param, q);
      EXPECT_GE(c.theta[q], -std::numbers::pi);
      EXPECT_LT(c.theta[q], std::numbers::pi);
      if (g.kind == GeneratorKind::Z) {
        ++z;
        EXPECT_EQ(g.layer, 0u);
      } else {
        EXPECT_LT(g.site + 1, n);
        EXPECT_EQ(g.site % 2, g.layer - 1);
      }
    }
    EXPECT_EQ(z, static_cast<std::size_t>(n) * n);
  }
  EXPECT_EQ(build_ansatz(5, 1, 2).num_params(), 18u);
  EXPECT_THROW(build_ansatz(1, 1), std::invalid_argument);
}

TEST(circuit, build_ansatz_deterministic) {
  const auto a = build_ansatz(6, 42), b = build_ansatz(6, 42), c = build_ansatz(6, 43);
  ASSERT_EQ(a.gates.size(), b.gates.size());
  for (std::size_t q = 0; q < a.gates.size(); ++q) {
    EXPECT_EQ(a.gates[q].kind, b.gates[q].kind);
    EXPECT_EQ(a.gates[q].site, b.gates[q].site);
  }
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_NE(a.theta, c.theta);
}

TEST(circuit, two_qubit_kinds_roughly_uniform) {
  std::map<GeneratorKind, int> counts;
  for (std::uint64_t s = 0; s < 50; ++s)
    for (const auto& g : build_ansatz(8, s).gates)
      if (g.kind != GeneratorKind::Z) ++counts[g.kind];
  int total = 0;
  for (auto& [k, v] : counts) total += v;
  for (auto k : {GeneratorKind::XX, GeneratorKind::XY, GeneratorKind::YX, GeneratorKind::YY})
    EXPECT_NEAR(counts[k] / static_cast<double>(total), 0.25, 0.03);
}

TEST(circuit, gate_table_examples) {
  auto z1 = build_gate_table(Generator::make(GeneratorKind::Z, 0, 2), 2, 2);
  EXPECT_EQ(z1.pairs.size(), 2u);
  std::set<std::uint32_t> seen;
  for (const auto& p : z1.pairs) {
    for (auto r : {p.lo, p.hi()}) {
      const auto t = unrank(r, 2, 2);
      const int hits = (t[0] <= 1) + (t[1] <= 1);
      EXPECT_EQ(hits, 1);
      seen.insert(r);
    }
  }
  EXPECT_EQ(seen.size(), 4u);

  auto xx = build_gate_table(Generator::make(GeneratorKind::XX, 0, 3), 4, 3);
  EXPECT_EQ(xx.pairs.size(), 4u);
}

// Pair structure and signs agree with a dense brute-force commutator search.
TEST(circuit, gate_tables_match_dense_brute_force) {
  for (std::uint32_t n = 2; n <= 4; ++n)
    for (std::uint32_t kappa : {2u, 4u}) {
      if (kappa > 2 * n) continue;
      for (auto kind : kAllKinds)
        for (std::uint32_t site = 0; site + (kind == GeneratorKind::Z ? 0 : 1) < n; ++site) {
          const auto gen = Generator::make(kind, site, n);
          const auto table = build_gate_table(gen, kappa, n);
          const auto brute = brute_pairs(gen, kappa, n);
          ASSERT_EQ(table.pairs.size(), brute.size());
          for (std::size_t k = 0; k < brute.size(); ++k) {
            EXPECT_EQ(table.pairs[k].lo, brute[k].lo);
            EXPECT_EQ(table.pairs[k].hi(), brute[k].hi);
            EXPECT_EQ(table.pairs[k].sign(), brute[k].sign);
          }
        }
    }
}

TEST(circuit, pair_counts_closed_form) {
  for (std::uint32_t n = 2; n <= 8; ++n)
    for (auto kind : kAllKinds) {
      const auto gen = Generator::make(kind, 0, n);
      const auto t2 = build_gate_table(gen, 2, n);
      EXPECT_EQ(t2.pairs.size(), binomial(2 * n - 2, 1));
      const auto t4 = build_gate_table(gen, 4, n);
      EXPECT_EQ(t4.pairs.size(), binomial(2 * n - 2, 3));
      std::set<std::uint32_t> seen;
      for (const auto& p : t4.pairs) {
        EXPECT_LT(p.lo, p.hi());
        EXPECT_TRUE(seen.insert(p.lo).second);
        EXPECT_TRUE(seen.insert(p.hi()).second);
      }
      // Commuting ranks (support disjoint from or containing the generator's) are absent.
      ModuleIndex idx(n, 4);
      for (std::uint64_t r = 0; r < idx.dim(); ++r) {
        const auto t = idx.unrank(r);
        int hits = 0;
        for (auto i : t) hits += (i == gen.support[0]) + (i == gen.support[1]);
        EXPECT_EQ(seen.count(static_cast<std::uint32_t>(r)) == 1, hits == 1);
      }
    }
}

TEST(circuit, apply_gate_examples) {
  const std::uint32_t n = 4;
  const auto t = build_gate_table(Generator::make(GeneratorKind::XY, 1, n), 4, n);
  Rng rng(5);
  const auto v0 = random_vector(dim_module(4, n), rng);
  auto v = v0;
  apply_gate(std::span<double>(v), t, 0.0);
  EXPECT_EQ(v, v0);
  apply_gate(std::span<double>(v), t, std::numbers::pi / 2);
  std::vector<bool> paired(v.size(), false);
  for (const auto& p : t.pairs) paired[p.lo] = paired[p.hi()] = true;
  for (std::size_t r = 0; r < v.size(); ++r) EXPECT_NEAR(v[r], paired[r] ? -v0[r] : v0[r], 1e-15);

  // Z_1 commutes with the only B_4 element for n = 2.
  auto phi = project_basis_state({0, 0}, 4);
  const auto tz = build_gate_table(Generator::make(GeneratorKind::Z, 0, 2), 4, 2);
  EXPECT_TRUE(tz.pairs.empty());
  for (double th : {0.1, 1.3, -2.0}) {
    apply_gate(phi, tz, th);
    EXPECT_DOUBLE_EQ(phi.coeffs[0], 0.5);
  }
  ModuleVector wrong(2, 2);
  EXPECT_THROW(apply_gate(wrong, tz, 0.3), std::invalid_argument);
}

TEST(circuit, apply_gate_isometry_and_inverse) {
  Rng rng(9);
  for (std::uint32_t n : {3u, 5u, 7u}) {
    TableCache cache(n);
    for (int rep = 0; rep < 20; ++rep) {
      const auto kind = kAllKinds[rng.below(5)];
      const std::uint32_t site = static_cast<std::uint32_t>(rng.below(n - 1));
      const auto& t = *cache.get(kind, site, 4);
      const auto v0 = random_vector(dim_module(4, n), rng);
      auto v = v0;
      const double th = rng.uniform(-4, 4);
      apply_gate(std::span<double>(v), t, th);
      EXPECT_NEAR(norm2(v), norm2(v0), 1e-12);
      apply_gate(std::span<double>(v), t, -th);
      for (std::size_t r = 0; r < v.size(); ++r) ASSERT_NEAR(v[r], v0[r], 1e-12);
    }
  }
}

// The table rotation equals conjugation U b U^dag with U = exp(i theta gamma),
// checked on every basis element with dense matrices.
TEST(circuit, table_rotation_matches_dense_conjugation) {
  const std::uint32_t n = 3;
  for (std::uint32_t kappa : {2u, 4u}) {
    ModuleIndex idx(n, kappa);
    std::vector<orc::Mat> basis;
    for (std::uint64_t r = 0; r < idx.dim(); ++r) basis.push_back(orc::word_matrix(basis_pauli(idx.unrank(r), n).str()));
    for (auto kind : kAllKinds) {
      const auto gen = Generator::make(kind, 1, n);
      if (kind != GeneratorKind::Z && gen.site + 1 >= n) continue;
      const auto t = build_gate_table(gen, kappa, n);
      const double th = 0.37;
      const orc::Mat u = orc::rotation(orc::word_matrix(gen.pauli.str()), th);
      for (std::uint64_t l = 0; l < idx.dim(); ++l) {
        std::vector<double> e(idx.dim(), 0.0);
        e[l] = 1.0;
        apply_gate(std::span<double>(e), t, th);
        const orc::Mat conj = u * basis[l] * orc::adjoint(u);
        for (std::uint64_t m = 0; m < idx.dim(); ++m) {
          const orc::cplx c = orc::trace(orc::adjoint(basis[m]) * conj) / static_cast<double>(basis[m].dim);
          ASSERT_NEAR(c.real(), e[m], 1e-12) << to_string(kind) << " l=" << l << " m=" << m;
          ASSERT_NEAR(c.imag(), 0.0, 1e-12);
        }
      }
    }
  }
}

TEST(circuit, table_cache_shares_tables) {
  TableCache cache(5);
  auto a = cache.get(GeneratorKind::YX, 2, 4);
  auto b = cache.get(GeneratorKind::YX, 2, 4);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(cache.size(), 1u);
  const auto c = build_ansatz(5, 7);
  ProjectedCircuit pc(c, cache);
  EXPECT_TRUE(pc.has_readout());
  EXPECT_LE(cache.size(), 2u * (5 + 4 * 4));
  ProjectedCircuit bare(c, cache, false);
  EXPECT_FALSE(bare.has_readout());
  TableCache other(4);
  EXPECT_THROW(ProjectedCircuit(c, other), std::invalid_argument);
}
