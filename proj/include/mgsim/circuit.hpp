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
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "mgsim/algebra.hpp"
#include "mgsim/combinadic.hpp"
#include "mgsim/modspace.hpp"
#include "mgsim/random.hpp"

namespace mgsim {

/// Matchgate generator families: Z on one site, or a two-letter word on the
/// nearest-neighbour pair (site, site+1).
enum class GeneratorKind : std::uint8_t { Z, XX, XY, YX, YY };

inline const char* to_string(GeneratorKind k) {
  constexpr const char* names[] = {"Z", "XX", "XY", "YX", "YY"};
  return names[static_cast<int>(k)];
}

inline PauliString generator_pauli(GeneratorKind kind, std::uint32_t site, std::uint32_t n) {
  PauliString p(n);
  if (kind == GeneratorKind::Z) {
    p.set(site, Pauli::Z);
    return p;
  }
  if (site + 1 >= n) throw std::out_of_range("two-qubit generator needs site + 1 < n");
  const bool first_y = kind == GeneratorKind::YX || kind == GeneratorKind::YY;
  const bool second_y = kind == GeneratorKind::XY || kind == GeneratorKind::YY;
  p.set(site, first_y ? Pauli::Y : Pauli::X);
  p.set(site + 1, second_y ? Pauli::Y : Pauli::X);
  return p;
}

/// A quadratic Majorana generator gamma (gamma^2 = I) with its support.
struct Generator {
  GeneratorKind kind = GeneratorKind::Z;
  std::uint32_t site = 0;
  PauliString pauli;
  std::array<std::uint32_t, 2> support{};

  static Generator make(GeneratorKind kind, std::uint32_t site, std::uint32_t n) {
    Generator g{kind, site, generator_pauli(kind, site, n), {}};
    auto dec = majorana_decompose(g.pauli);
    if (dec.indices.size() != 2) throw std::logic_error("generator is not quadratic in Majoranas");
    g.support = {dec.indices[0], dec.indices[1]};
    return g;
  }
};

/// Effective action of exp(i theta gamma) on B_kappa: disjoint rank pairs
/// (lo, hi) with i*gamma*b_lo = sign * b_hi. Ranks absent from the table
/// commute with gamma.
struct GateTable {
  struct Pair {
    std::uint32_t lo;
    std::uint32_t hi_sign;  // bit 31 set when sign is -1

    std::uint32_t hi() const { return hi_sign & 0x7fffffffu; }
    double sign() const { return (hi_sign >> 31) ? -1.0 : 1.0; }
  };

  GeneratorKind kind = GeneratorKind::Z;
  std::uint32_t site = 0;
  std::uint32_t n = 0;
  std::uint32_t kappa = 0;
  std::array<std::uint32_t, 2> support{};
  std::vector<Pair> pairs;

  /// Fault-injection hook for verification tests.
  void flip_sign(std::size_t i) { pairs.at(i).hi_sign ^= 0x80000000u; }
};

/// Enumerates every rank of B_kappa that anticommutes with the generator
/// (exactly one support index present) and pairs it with the rank obtained
/// by swapping that index. Signs come from exact Pauli products.
inline GateTable build_gate_table(const Generator& gen, std::uint32_t kappa, std::uint32_t n) {
  if (kappa < 1 || kappa > 2 * n) throw std::invalid_argument("build_gate_table: kappa out of range");
  if (dim_module(kappa, n) >= (std::uint64_t{1} << 31)) throw std::overflow_error("build_gate_table: module too large");
  GateTable t{gen.kind, gen.site, n, kappa, gen.support, {}};
  const std::uint32_t a = gen.support[0], b = gen.support[1];
  std::vector<std::uint32_t> others;
  others.reserve(2 * n - 2);
  for (std::uint32_t i = 0; i < 2 * n; ++i)
    if (i != a && i != b) others.push_back(i);
  if (kappa - 1 > others.size()) return t;  // every kappa-subset contains both support indices

  const BinomialTable binom(2 * n + 1, kappa);
  t.pairs.reserve(binomial(2 * n - 2, kappa - 1));
  std::vector<std::uint32_t> pos(kappa - 1);
  for (std::uint32_t k = 0; k < pos.size(); ++k) pos[k] = k;
  std::vector<std::uint32_t> with_a(kappa), with_b(kappa);
  PauliString prod(n), scratch(n), partner(n);

  auto fill = [&](std::vector<std::uint32_t>& out, std::uint32_t extra) {
    std::size_t j = 0, k = 0;
    while (k < pos.size() && others[pos[k]] < extra) out[j++] = others[pos[k++]];
    out[j++] = extra;
    while (k < pos.size()) out[j++] = others[pos[k++]];
  };

  do {
    fill(with_a, a);
    fill(with_b, b);
    auto ra = binom.rank(with_a), rb = binom.rank(with_b);
    const auto& lo_set = ra < rb ? with_a : with_b;
    const auto& hi_set = ra < rb ? with_b : with_a;
    // b_lo as phase-stripped Pauli word; gamma has phase 0.
    assign_majorana_product(prod, scratch, lo_set);
    prod.set_phase(0);
    PauliString gb = gen.pauli;
    gb *= prod;
    assign_majorana_product(partner, scratch, hi_set);
    if (!gb.same_letters(partner)) throw std::logic_error("build_gate_table: partner letters mismatch");
    // i * gamma * b_lo = i^(phase+1) * word(b_hi); must be real.
    const int k = (gb.phase() + 1) & 3;
    if (k != 0 && k != 2) throw std::logic_error("build_gate_table: commutator is not real");
    const auto lo = static_cast<std::uint32_t>(std::min(ra, rb));
    const auto hi = static_cast<std::uint32_t>(std::max(ra, rb));
    t.pairs.push_back({lo, hi | (k == 2 ? 0x80000000u : 0u)});
  } while (!pos.empty() && next_colex(pos, static_cast<std::uint32_t>(others.size())));

  std::sort(t.pairs.begin(), t.pairs.end(), [](const GateTable::Pair& x, const GateTable::Pair& y) { return x.lo < y.lo; });
  return t;
}

/// v <- M(theta) v on the paired ranks: planar rotation by 2*theta.
inline void apply_gate(std::span<double> v, const GateTable& t, double theta) {
  const double c = std::cos(2 * theta), s = std::sin(2 * theta);
  double* d = v.data();
  for (const auto& p : t.pairs) {
    const double x = d[p.lo];
    const std::uint32_t h = p.hi();
    const double y = d[h];
    const double ss = p.sign() * s;
    d[p.lo] = c * x - ss * y;
    d[h] = c * y + ss * x;
  }
}

inline void apply_gate(ModuleVector& v, const GateTable& t, double theta) {
  if (v.kappa != t.kappa || v.n != t.n) throw std::invalid_argument("apply_gate: module mismatch");
  apply_gate(std::span<double>(v.coeffs), t, theta);
}

// ---------------------------------------------------------------------------
// Windowed application.
//
// Fix a window [a, b) of Majorana indices. Every kappa-subset splits into a
// part L below a, a part M inside the window and a part H at or above b, and
// its colex rank is offset(H) + offset(M) + rank(L), where offset(M) only
// depends on M and |L|, and rank(L) runs over 0..C(a,|L|)-1. For a fixed H
// and fixed sizes the entries therefore form a matrix: one row per M, whose
// columns (one per L) are contiguous. A gate whose support lies inside the
// window only mixes rows of such a matrix, with the same row pairs and signs
// for every column, so the gates of a layer can be applied tile by tile.

struct Window {
  struct Block {
    std::uint32_t base;  // offset(H)
    std::uint8_t k_low;
    std::uint8_t k_mid;
  };

  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::vector<Block> blocks;  // k_mid >= 1 only; ascending base within each class
  /// row_offset[k_low][k_mid][x]: offset(M) for the x-th k_mid-subset of the window, colex order.
  std::array<std::array<std::vector<std::uint32_t>, 5>, 5> row_offset;
  std::array<std::array<std::uint32_t, 5>, 5> columns{};  // C(a, k_low)

  std::uint32_t width() const { return b - a; }
  bool contains(const std::array<std::uint32_t, 2>& s) const {
    return std::min(s[0], s[1]) >= a && std::max(s[0], s[1]) < b;
  }
};

/// Blocks and row offsets of the window [a, b) in the kappa module.
inline Window make_window(std::uint32_t n, std::uint32_t kappa, std::uint32_t a, std::uint32_t b) {
  const std::uint32_t N = 2 * n;
  if (a >= b || b > N || a % 2 || b % 2) throw std::invalid_argument("make_window: bad range");
  if (kappa > 4) throw std::invalid_argument("make_window: kappa must be at most 4");
  if (binomial(N, kappa) > 0x7fffffffull) throw std::length_error("make_window: module too large for 31-bit ranks");
  Window w;
  w.a = a;
  w.b = b;
  const std::uint32_t width = b - a;
  for (std::uint32_t k_mid = 1; k_mid <= kappa && k_mid <= width; ++k_mid) {
    for (std::uint32_t k_low = 0; k_low + k_mid <= kappa && k_low <= a; ++k_low) {
      const std::uint32_t k_high = kappa - k_mid - k_low;
      if (k_high > N - b) continue;
      w.columns[k_low][k_mid] = static_cast<std::uint32_t>(binomial(a, k_low));
      auto& rows = w.row_offset[k_low][k_mid];
      std::vector<std::uint32_t> m(k_mid);
      for (std::uint32_t i = 0; i < k_mid; ++i) m[i] = i;
      do {
        std::uint64_t off = 0;
        for (std::uint32_t i = 0; i < k_mid; ++i) off += binomial(a + m[i], k_low + i + 1);
        rows.push_back(static_cast<std::uint32_t>(off));
      } while (next_colex(m, width));
      std::vector<std::uint32_t> h(k_high);
      for (std::uint32_t j = 0; j < k_high; ++j) h[j] = j;
      do {
        std::uint64_t base = 0;
        for (std::uint32_t j = 0; j < k_high; ++j) base += binomial(b + h[j], k_low + k_mid + j + 1);
        w.blocks.push_back({static_cast<std::uint32_t>(base), static_cast<std::uint8_t>(k_low),
                            static_cast<std::uint8_t>(k_mid)});
      } while (k_high > 0 && next_colex(h, N - b));
    }
  }
  return w;
}

/// How the 2n indices are split into windows: `count` windows, consecutive
/// ones sharing `overlap` indices. Zero fields pick defaults for n.
struct WindowPlan {
  std::uint32_t count = 0;
  std::uint32_t overlap = 0;
};

/// Overlapping windows covering all 2n indices. Edges sit on site
/// boundaries (even indices), because a site split by an edge would make the
/// signs depend on the parts outside the window. An overlap of at least four
/// lets every brickwork support (span at most 3) fit some window.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> window_ranges(std::uint32_t n, std::uint32_t count,
                                                                        std::uint32_t overlap = 4) {
  const std::uint32_t N = 2 * n;
  if (count == 0) throw std::invalid_argument("window_ranges: need at least one window");
  if (overlap < 4 || overlap % 2) throw std::invalid_argument("window_ranges: overlap must be even and at least 4");
  if (count == 1) return {{0, N}};
  std::uint32_t width = (N + overlap * (count - 1) + count - 1) / count;
  width += width % 2;
  if (width <= overlap) throw std::invalid_argument("window_ranges: too many windows");
  std::vector<std::pair<std::uint32_t, std::uint32_t>> r;
  for (std::uint32_t a = 0;; a += width - overlap) {
    const std::uint32_t b = std::min(N, a + width);
    r.emplace_back(a, b);
    if (b == N) break;
  }
  return r;
}

/// Windows at most about `max_width` wide, overlapping by a third of that.
inline WindowPlan default_window_plan(std::uint32_t n, std::uint32_t max_width = 44) {
  const std::uint32_t N = 2 * n;
  if (N <= max_width) return {1, 4};
  const std::uint32_t overlap = std::max<std::uint32_t>(4, (max_width / 3) & ~1u);
  const std::uint32_t count = (N - overlap + (max_width - overlap) - 1) / (max_width - overlap);
  return {count, overlap};
}

/// Row pairs of one gate inside the blocks of a window, per (k_low, k_mid).
/// lo and hi hold row offsets relative to the block base.
struct LocalTables {
  std::array<std::array<std::vector<GateTable::Pair>, 5>, 5> rows;
};

/// Reads the row pairs off the first column of the first block of each
/// class and checks them against the last column and the last block, then
/// checks that the classes account for every pair of the full table.
inline LocalTables extract_local_tables(const GateTable& t, const Window& w) {
  if (!w.contains(t.support)) throw std::invalid_argument("extract_local_tables: gate outside window");
  LocalTables out;
  std::array<std::array<std::uint64_t, 5>, 5> block_count{};
  std::array<std::array<std::uint32_t, 5>, 5> first_base{}, last_base{};
  for (const auto& blk : w.blocks) {
    if (block_count[blk.k_low][blk.k_mid]++ == 0) first_base[blk.k_low][blk.k_mid] = blk.base;
    last_base[blk.k_low][blk.k_mid] = blk.base;
  }
  auto find_pair = [&](std::uint64_t lo) -> const GateTable::Pair* {
    auto it = std::lower_bound(t.pairs.begin(), t.pairs.end(), lo,
                               [](const GateTable::Pair& p, std::uint64_t v) { return p.lo < v; });
    return (it != t.pairs.end() && it->lo == lo) ? &*it : nullptr;
  };
  std::uint64_t covered = 0;
  for (std::uint32_t kl = 0; kl <= 4; ++kl) {
    for (std::uint32_t km = 1; km <= 4; ++km) {
      if (!block_count[kl][km]) continue;
      const auto& off = w.row_offset[kl][km];
      const std::uint32_t cols = w.columns[kl][km];
      auto& dst = out.rows[kl][km];
      const std::pair<std::uint32_t, std::uint32_t> probes[] = {
          {first_base[kl][km], 0u}, {first_base[kl][km], cols - 1}, {last_base[kl][km], 0u}};
      for (std::size_t probe = 0; probe < 3; ++probe) {
        const auto [base, col] = probes[probe];
        std::vector<GateTable::Pair> found;
        for (std::uint32_t x = 0; x < off.size(); ++x) {
          const std::uint64_t r = std::uint64_t{base} + off[x] + col;
          const GateTable::Pair* p = find_pair(r);
          if (!p) continue;
          const std::uint64_t hrow = p->hi() - std::uint64_t{base} - col;
          auto hit = std::lower_bound(off.begin(), off.end(), hrow);
          if (hit == off.end() || *hit != hrow) throw std::logic_error("extract_local_tables: pair leaves its block");
          found.push_back({off[x], static_cast<std::uint32_t>(hrow) | (p->hi_sign & 0x80000000u)});
        }
        if (probe == 0) {
          dst = std::move(found);
        } else if (found.size() != dst.size() ||
                   !std::equal(found.begin(), found.end(), dst.begin(), [](const auto& x, const auto& y) {
                     return x.lo == y.lo && x.hi_sign == y.hi_sign;
                   })) {
          throw std::logic_error("extract_local_tables: blocks disagree");
        }
      }
      covered += block_count[kl][km] * cols * dst.size();
    }
  }
  if (covered != t.pairs.size()) throw std::logic_error("extract_local_tables: pair count mismatch");
  return out;
}

/// A run of consecutive gates [begin, end) split over the windows. Every
/// gate sits in a window no earlier than that of any earlier gate of the run
/// it shares a support index with, so applying the windows in order, each
/// list in gate order, gives the same operator as the plain gate sequence.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<std::vector<std::size_t>> by_window;
  std::vector<std::size_t> rest;  // a lone gate that fits no window, applied with its full table
};

// ---------------------------------------------------------------------------
// Ansatz.

struct Gate {
  GeneratorKind kind = GeneratorKind::Z;
  std::uint32_t site = 0;
  std::uint32_t block = 0;
  std::uint32_t layer = 0;  // 0: Z layer, 1: even pairs, 2: odd pairs
  std::size_t param = 0;
};

/// Ordered gate list plus one angle per gate. Gate q applies
/// exp(i * theta[q] * gamma_q).
struct Circuit {
  std::uint32_t n = 0;
  std::uint32_t blocks = 0;
  std::vector<Gate> gates;
  std::vector<double> theta;

  std::size_t num_params() const { return theta.size(); }
};

/// Brickwork matchgate ansatz: each block is a Z layer on all n qubits, then
/// two-qubit gates on pairs (1,2),(3,4),... and then (2,3),(4,5),..., for
/// 2n-1 gates per block. Two-qubit kinds are drawn uniformly from
/// {XX, XY, YX, YY}; angles uniformly from [-pi, pi). blocks = 0 means n.
inline Circuit build_ansatz(std::uint32_t n, std::uint64_t seed, std::uint32_t blocks = 0) {
  if (n < 2) throw std::invalid_argument("build_ansatz: need n >= 2");
  Circuit c;
  c.n = n;
  c.blocks = blocks == 0 ? n : blocks;
  Rng rng(seed);
  constexpr GeneratorKind pair_kinds[] = {GeneratorKind::XX, GeneratorKind::XY, GeneratorKind::YX, GeneratorKind::YY};
  for (std::uint32_t blk = 0; blk < c.blocks; ++blk) {
    for (std::uint32_t q = 0; q < n; ++q) c.gates.push_back({GeneratorKind::Z, q, blk, 0, c.gates.size()});
    for (std::uint32_t layer = 1; layer <= 2; ++layer)
      for (std::uint32_t q = layer - 1; q + 1 < n; q += 2)
        c.gates.push_back({pair_kinds[rng.below(4)], q, blk, layer, c.gates.size()});
  }
  c.theta.resize(c.gates.size());
  for (auto& th : c.theta) th = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return c;
}

/// Shared, lazily built gate tables for one qubit count.
class TableCache {
 public:
  explicit TableCache(std::uint32_t n) : n_(n) {}

  std::uint32_t n() const { return n_; }

  std::shared_ptr<const GateTable> get(GeneratorKind kind, std::uint32_t site, std::uint32_t kappa) {
    const auto key = std::make_tuple(kind, site, kappa);
    {
      std::lock_guard lock(mu_);
      if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    }
    auto table = std::make_shared<const GateTable>(build_gate_table(Generator::make(kind, site, n_), kappa, n_));
    std::lock_guard lock(mu_);
    return tables_.emplace(key, std::move(table)).first->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return tables_.size();
  }

 private:
  std::uint32_t n_;
  mutable std::mutex mu_;
  std::map<std::tuple<GeneratorKind, std::uint32_t, std::uint32_t>, std::shared_ptr<const GateTable>> tables_;
};

/// A circuit bound to its B_4 (cost) and optionally B_2 (readout) tables,
/// with the windowed schedule used by the engine.
class ProjectedCircuit {
 public:
  ProjectedCircuit(const Circuit& c, TableCache& cache, bool with_readout = true, WindowPlan plan = {})
      : n_(c.n), gates_(c.gates) {
    if (cache.n() != c.n) throw std::invalid_argument("ProjectedCircuit: cache built for a different n");
    t4_.reserve(gates_.size());
    for (const auto& g : gates_) {
      t4_.push_back(cache.get(g.kind, g.site, 4));
      if (with_readout) t2_.push_back(cache.get(g.kind, g.site, 2));
    }
    const WindowPlan def = default_window_plan(n_);
    if (!plan.count) plan.count = def.count;
    if (!plan.overlap) plan.overlap = def.overlap;
    for (auto [a, b] : window_ranges(n_, plan.count, plan.overlap)) windows_.push_back(make_window(n_, 4, a, b));
    build_segments();
    local_.assign(gates_.size(), std::vector<std::shared_ptr<const LocalTables>>(windows_.size()));
    std::map<std::pair<const GateTable*, std::size_t>, std::shared_ptr<const LocalTables>> shared;
    for (const auto& seg : segments_) {
      for (std::size_t k = 0; k < seg.by_window.size(); ++k) {
        for (std::size_t q : seg.by_window[k]) {
          auto& slot = shared[{t4_[q].get(), k}];
          if (!slot) slot = std::make_shared<const LocalTables>(extract_local_tables(*t4_[q], windows_[k]));
          local_[q][k] = slot;
        }
      }
    }
  }

  std::uint32_t n() const { return n_; }
  std::size_t size() const { return gates_.size(); }
  const std::vector<Gate>& gates() const { return gates_; }
  bool has_readout() const { return !t2_.empty(); }

  const GateTable& table4(std::size_t q) const { return *t4_[q]; }
  const GateTable& table2(std::size_t q) const { return *t2_.at(q); }

  const std::vector<Window>& windows() const { return windows_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const LocalTables& local4(std::size_t q, std::size_t window) const { return *local_[q][window]; }

  /// Swaps in a private copy of one gate's table (fault injection).
  void replace_table4(std::size_t q, GateTable t) {
    t4_.at(q) = std::make_shared<const GateTable>(std::move(t));
    for (std::size_t k = 0; k < windows_.size(); ++k)
      if (local_[q][k]) local_[q][k] = std::make_shared<const LocalTables>(extract_local_tables(*t4_[q], windows_[k]));
  }

 private:
  /// Greedy: each gate takes the first window that holds its support and
  /// is no earlier than the windows of the run's gates already on its
  /// support indices; a gate with no such window starts a new run.
  void build_segments() {
    constexpr std::uint32_t none = ~0u;
    const std::size_t W = windows_.size();
    std::vector<std::uint32_t> floor(2 * n_, 0);  // latest window used on each index in the current run
    Segment cur{0, 0, std::vector<std::vector<std::size_t>>(W), {}};
    auto close = [&](std::size_t q) {
      cur.end = q;
      if (cur.end > cur.begin) segments_.push_back(std::move(cur));
      cur = Segment{q, q, std::vector<std::vector<std::size_t>>(W), {}};
      std::fill(floor.begin(), floor.end(), 0);
    };
    auto place = [&](const std::array<std::uint32_t, 2>& sup) {
      for (std::uint32_t k = std::max(floor[sup[0]], floor[sup[1]]); k < W; ++k)
        if (windows_[k].contains(sup)) return k;
      return none;
    };
    for (std::size_t q = 0; q < gates_.size(); ++q) {
      const auto& sup = t4_[q]->support;
      std::uint32_t k = place(sup);
      if (k == none) {
        close(q);
        k = place(sup);
      }
      if (k == none) {
        cur.rest.push_back(q);
        close(q + 1);
        continue;
      }
      cur.by_window[k].push_back(q);
      floor[sup[0]] = floor[sup[1]] = k;
    }
    close(gates_.size());
  }

  std::uint32_t n_;
  std::vector<Gate> gates_;
  std::vector<std::shared_ptr<const GateTable>> t4_;
  std::vector<std::shared_ptr<const GateTable>> t2_;
  std::vector<Window> windows_;
  std::vector<std::vector<std::shared_ptr<const LocalTables>>> local_;  // [gate][window], set where used
  std::vector<Segment> segments_;
};

}  // namespace mgsim
