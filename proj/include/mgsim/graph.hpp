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
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mgsim/random.hpp"

namespace mgsim {

/// Bitstring over n qubits/vertices; entry i is 0 or 1 for vertex i+1.
using Bits = std::vector<std::uint8_t>;

inline std::string to_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

inline Bits bits_from_string(const std::string& s) {
  Bits out;
  out.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring must contain only 0 and 1");
    out.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return out;
}

inline int parity(const Bits& bits) {
  int p = 0;
  for (auto b : bits) p ^= b;
  return p;
}

class GraphError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Edge {
  std::uint32_t u;  // 1-based, u < v
  std::uint32_t v;
  std::int64_t weight;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted simple graph on vertices 1..n.
struct Graph {
  std::uint32_t n_vertices = 0;
  std::vector<Edge> edges;

  friend bool operator==(const Graph&, const Graph&) = default;

  std::int64_t total_weight() const {
    std::int64_t w = 0;
    for (const auto& e : edges) w += e.weight;
    return w;
  }

  std::int64_t max_abs_weight() const {
    std::int64_t w = 0;
    for (const auto& e : edges) w = std::max(w, e.weight < 0 ? -e.weight : e.weight);
    return w;
  }

  /// Throws GraphError on self-loops, duplicates or out-of-range vertices.
  /// Edges given as (v, u) with v > u are normalized.
  void validate_and_normalize() {
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    for (auto& e : edges) {
      if (e.u == e.v) throw GraphError("self-loop on vertex " + std::to_string(e.u));
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u < 1 || e.v > n_vertices)
        throw GraphError("vertex out of range in edge " + std::to_string(e.u) + " " + std::to_string(e.v));
      if (!seen.emplace(e.u, e.v).second)
        throw GraphError("duplicate edge " + std::to_string(e.u) + " " + std::to_string(e.v));
    }
  }

  std::vector<int> degrees() const {
    std::vector<int> d(n_vertices, 0);
    for (const auto& e : edges) {
      ++d[e.u - 1];
      ++d[e.v - 1];
    }
    return d;
  }

  bool connected() const {
    if (n_vertices == 0) return true;
    std::vector<std::uint32_t> parent(n_vertices);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::uint32_t components = n_vertices;
    for (const auto& e : edges) {
      auto a = find(e.u - 1), b = find(e.v - 1);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    return components == 1;
  }
};

/// Ising energy sum_{(i,j)} w_ij z_i z_j with z = 1 - 2*bit.
inline std::int64_t classical_energy(const Graph& g, const Bits& bits) {
  if (bits.size() != g.n_vertices) throw std::invalid_argument("classical_energy: bitstring length mismatch");
  std::int64_t e = 0;
  for (const auto& edge : g.edges) e += (bits[edge.u - 1] == bits[edge.v - 1]) ? edge.weight : -edge.weight;
  return e;
}

/// Total weight of edges crossing the partition.
inline std::int64_t cut_value(const Graph& g, const Bits& bits) {
  return (g.total_weight() - classical_energy(g, bits)) / 2;
}

// ---------------------------------------------------------------------------
// File format: "n m" header, then m lines "u v w" with 1-based vertices.

inline Graph read_graph(std::istream& in) {
  Graph g;
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      auto first = out.find_first_not_of(" \t\r");
      if (first != std::string::npos && out[first] != '#') return true;
    }
    return false;
  };
  if (!next_line(line)) throw GraphError("graph file: missing header");
  long long n = -1, m = -1;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> m) || (hs >> extra) || n <= 0 || m < 0)
      throw GraphError("graph file: malformed header '" + line + "'");
  }
  g.n_vertices = static_cast<std::uint32_t>(n);
  g.edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    if (!next_line(line)) throw GraphError("graph file: expected " + std::to_string(m) + " edges");
    std::istringstream es(line);
    long long u, v, w;
    if (!(es >> u >> v >> w)) throw GraphError("graph file: malformed edge line '" + line + "'");
    if (u < 1 || v < 1 || u > n || v > n) throw GraphError("graph file: vertex out of range in '" + line + "'");
    g.edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), w});
  }
  g.validate_and_normalize();
  return g;
}

inline Graph parse_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file " + path);
  return read_graph(in);
}

inline void write_graph(const Graph& g, std::ostream& out) {
  out << g.n_vertices << ' ' << g.edges.size() << '\n';
  for (const auto& e : g.edges) out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
}

inline void write_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GraphError("cannot write graph file " + path);
  write_graph(g, out);
}

// ---------------------------------------------------------------------------
// Generators.

/// Random connected simple 3-regular graph via the pairing model with
/// rejection. Unit weights, edges sorted.
inline Graph random_3regular(std::uint32_t n, std::uint64_t seed) {
  if (n < 4) throw GraphError("3-regular graph needs n >= 4");
  if (n % 2 != 0) throw GraphError("3-regular graph needs even n");
  Rng rng(seed);
  std::vector<std::uint32_t> points(3 * n);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (std::uint32_t k = 0; k < points.size(); ++k) points[k] = k / 3;
    rng.shuffle(std::span<std::uint32_t>(points));
    Graph g;
    g.n_vertices = n;
    std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
    bool ok = true;
    for (std::size_t k = 0; k < points.size() && ok; k += 2) {
      auto a = points[k] + 1, b = points[k + 1] + 1;
      if (a == b) {
        ok = false;
        break;
      }
      if (a > b) std::swap(a, b);
      if (!seen.emplace(a, b).second) ok = false;
      g.edges.push_back({a, b, 1});
    }
    if (!ok || !g.connected()) continue;
    std::sort(g.edges.begin(), g.edges.end(),
              [](const Edge& x, const Edge& y) { return std::pair(x.u, x.v) < std::pair(y.u, y.v); });
    return g;
  }
  throw GraphError("random_3regular: rejection sampling did not converge");
}

/// G(n, p) with independent unit-weight edges.
inline Graph random_erdos_renyi(std::uint32_t n, double p, std::uint64_t seed) {
  if (n < 1) throw GraphError("graph needs at least one vertex");
  if (!(p >= 0.0 && p <= 1.0)) throw GraphError("edge probability must lie in [0, 1]");
  Rng rng(seed);
  Graph g;
  g.n_vertices = n;
  for (std::uint32_t u = 1; u <= n; ++u)
    for (std::uint32_t v = u + 1; v <= n; ++v)
      if (rng.uniform01() < p) g.edges.push_back({u, v, 1});
  return g;
}

}  // namespace mgsim
