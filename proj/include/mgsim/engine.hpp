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
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mgsim/circuit.hpp"
#include "mgsim/graph.hpp"
#include "mgsim/modspace.hpp"

namespace mgsim {

struct EvalOptions {
  /// Store a B_4 snapshot at segment starts at least `checkpoint_stride`
  /// gates apart; 0 disables. The reverse sweep resets to these snapshots
  /// instead of relying only on inverse rotations.
  std::size_t checkpoint_stride = 0;
};

/// Evolving projections of the state: phi4 feeds the cost, phi2 the
/// single-site readout.
struct EvalState {
  ModuleVector phi4;
  ModuleVector phi2;
  std::vector<std::pair<std::size_t, std::vector<double>>> checkpoints;  // (gates applied, phi4)
};

namespace detail {

inline void check_inputs(const ProjectedCircuit& pc, std::span<const double> theta, const Bits& init) {
  if (theta.size() != pc.size()) throw std::invalid_argument("theta length differs from gate count");
  if (init.size() != pc.n()) throw std::invalid_argument("initial bitstring length differs from n");
}

inline void check_eta(const ProjectedCircuit& pc, const ModuleVector& eta) {
  if (eta.kappa != 4 || eta.n != pc.n()) throw std::invalid_argument("eta must be a B_4 vector for the same n");
}

}  // namespace detail

namespace detail {

struct Rotation {
  double c;
  double s;
};

inline void rotate_pairs(double* d, const GateTable::Pair* p, const GateTable::Pair* end, Rotation r) {
  for (; p != end; ++p) {
    const std::uint32_t h = p->hi();
    const double x = d[p->lo], y = d[h];
    const double ss = p->sign() * r.s;
    d[p->lo] = r.c * x - ss * y;
    d[h] = r.c * y + ss * x;
  }
}

/// Pulls state and adjoint back through one gate and returns the gradient
/// sum against the post-gate pair.
inline double unrotate_pairs(double* vd, double* ad, const GateTable::Pair* p, const GateTable::Pair* end, Rotation r) {
  double g = 0;
  for (; p != end; ++p) {
    const std::uint32_t lo = p->lo, h = p->hi();
    const double s = p->sign();
    const double ul = vd[lo], uh = vd[h], al = ad[lo], ah = ad[h];
    g += s * (ah * ul - al * uh);
    const double ss = s * r.s;
    vd[lo] = r.c * ul + ss * uh;
    vd[h] = r.c * uh - ss * ul;
    ad[lo] = r.c * al + ss * ah;
    ad[h] = r.c * ah - ss * al;
  }
  return g;
}

inline Rotation rotation(double theta) { return {std::cos(2 * theta), std::sin(2 * theta)}; }

/// Entries per tile of a block: rows times the columns processed together.
/// Tiles span at least a cache line of columns when the block has them.
inline constexpr std::size_t kTileEntries = 32768;

inline std::uint32_t tile_columns(std::size_t rows, std::uint32_t cols) {
  const std::size_t want = std::max<std::size_t>(kTileEntries / rows, 8);
  return static_cast<std::uint32_t>(std::min<std::size_t>(want, cols));
}

/// Work for one block class of a window. Classes with at most one pair per
/// gate are flattened into one op list so that their many small blocks do
/// not pay a per-gate loop; the others keep one pair span per gate.
struct ClassProgram {
  struct Op {
    std::uint32_t lo;
    std::uint32_t hi;
    std::uint32_t slot;  // position of the gate in the window list
    float sign;
    double c;
    double ss;  // sign * sin
  };
  struct Span {
    const GateTable::Pair* begin;
    const GateTable::Pair* end;
  };
  bool flat = false;
  std::vector<Op> ops;      // forward order
  std::vector<Span> spans;  // one per gate
};

inline constexpr std::size_t kFlatPairsPerGate = 1;

inline std::array<std::array<ClassProgram, 5>, 5> compile_window(const ProjectedCircuit& pc, std::size_t wi,
                                                                 const std::vector<std::size_t>& gates,
                                                                 std::span<const Rotation> rot) {
  const Window& w = pc.windows()[wi];
  std::array<std::array<ClassProgram, 5>, 5> prog;
  for (std::uint32_t kl = 0; kl <= 4; ++kl) {
    for (std::uint32_t km = 1; km <= 4; ++km) {
      if (w.row_offset[kl][km].empty()) continue;
      auto& cp = prog[kl][km];
      std::size_t total = 0;
      for (std::size_t q : gates) total += pc.local4(q, wi).rows[kl][km].size();
      cp.flat = total <= kFlatPairsPerGate * gates.size();
      for (std::size_t k = 0; k < gates.size(); ++k) {
        const auto& pairs = pc.local4(gates[k], wi).rows[kl][km];
        if (!cp.flat) {
          cp.spans.push_back({pairs.data(), pairs.data() + pairs.size()});
          continue;
        }
        for (const auto& p : pairs)
          cp.ops.push_back({p.lo, p.hi(), static_cast<std::uint32_t>(k), static_cast<float>(p.sign()), rot[k].c,
                            p.sign() * rot[k].s});
      }
    }
  }
  return prog;
}

inline double op_sign(std::uint32_t hi_sign) { return (hi_sign >> 31) ? -1.0 : 1.0; }

inline void forward_window(const ProjectedCircuit& pc, std::size_t wi, const std::vector<std::size_t>& gates,
                           std::span<const double> theta, double* d) {
  if (gates.empty()) return;
  const Window& w = pc.windows()[wi];
  std::vector<Rotation> rot(gates.size());
  for (std::size_t k = 0; k < gates.size(); ++k) rot[k] = rotation(theta[gates[k]]);
  const auto prog = compile_window(pc, wi, gates, rot);
  for (const auto& blk : w.blocks) {
    const auto& cp = prog[blk.k_low][blk.k_mid];
    const std::uint32_t cols = w.columns[blk.k_low][blk.k_mid];
    const std::uint32_t step = cols == 1 ? 1 : tile_columns(w.row_offset[blk.k_low][blk.k_mid].size(), cols);
    for (std::uint32_t c0 = 0; c0 < cols; c0 += step) {
      double* base = d + blk.base + c0;
      const std::uint32_t len = std::min(step, cols - c0);
      auto rotate_rows = [&](std::uint32_t lo, std::uint32_t hi_sign, Rotation r) {
        double* x = base + lo;
        double* y = base + (hi_sign & 0x7fffffffu);
        const double ss = op_sign(hi_sign) * r.s;
        for (std::uint32_t l = 0; l < len; ++l) {
          const double u = x[l], v = y[l];
          x[l] = r.c * u - ss * v;
          y[l] = r.c * v + ss * u;
        }
      };
      if (cp.flat && len == 1) {
        for (const auto& op : cp.ops) {
          const double x = base[op.lo], y = base[op.hi];
          base[op.lo] = op.c * x - op.ss * y;
          base[op.hi] = op.c * y + op.ss * x;
        }
      } else if (cp.flat) {
        for (const auto& op : cp.ops) {
          double* x = base + op.lo;
          double* y = base + op.hi;
          for (std::uint32_t l = 0; l < len; ++l) {
            const double u = x[l], v = y[l];
            x[l] = op.c * u - op.ss * v;
            y[l] = op.c * v + op.ss * u;
          }
        }
      } else if (len == 1) {
        for (std::size_t k = 0; k < cp.spans.size(); ++k) rotate_pairs(base, cp.spans[k].begin, cp.spans[k].end, rot[k]);
      } else {
        for (std::size_t k = 0; k < cp.spans.size(); ++k)
          for (auto p = cp.spans[k].begin; p != cp.spans[k].end; ++p) rotate_rows(p->lo, p->hi_sign, rot[k]);
      }
    }
  }
}

inline void backward_window(const ProjectedCircuit& pc, std::size_t wi, const std::vector<std::size_t>& gates,
                             std::span<const double> theta, double* vd, double* ad, std::vector<double>& grad) {
  if (gates.empty()) return;
  const Window& w = pc.windows()[wi];
  const std::size_t m = gates.size();
  std::vector<Rotation> rot(m);
  std::vector<double> g(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) rot[k] = rotation(theta[gates[k]]);
  const auto prog = compile_window(pc, wi, gates, rot);
  for (const auto& blk : w.blocks) {
    const auto& cp = prog[blk.k_low][blk.k_mid];
    const std::uint32_t cols = w.columns[blk.k_low][blk.k_mid];
    const std::uint32_t step = cols == 1 ? 1 : tile_columns(w.row_offset[blk.k_low][blk.k_mid].size(), cols);
    for (std::uint32_t c0 = 0; c0 < cols; c0 += step) {
      const std::size_t shift = std::size_t{blk.base} + c0;
      const std::uint32_t len = std::min(step, cols - c0);
      // Gradient sum of one pair of rows; rotates both back.
      auto unrotate_rows = [&](std::uint32_t lo, std::uint32_t hi_sign, Rotation r) {
        const std::uint32_t hi = hi_sign & 0x7fffffffu;
        double* xv = vd + shift + lo;
        double* yv = vd + shift + hi;
        double* xa = ad + shift + lo;
        double* ya = ad + shift + hi;
        const double s = op_sign(hi_sign), ss = s * r.s;
        double part = 0;
        for (std::uint32_t l = 0; l < len; ++l) {
          const double ul = xv[l], uh = yv[l], al = xa[l], ah = ya[l];
          part += ah * ul - al * uh;
          xv[l] = r.c * ul + ss * uh;
          yv[l] = r.c * uh - ss * ul;
          xa[l] = r.c * al + ss * ah;
          ya[l] = r.c * ah - ss * al;
        }
        return s * part;
      };
      if (cp.flat && len == 1) {
        double* v = vd + shift;
        double* a = ad + shift;
        for (auto op = cp.ops.rbegin(); op != cp.ops.rend(); ++op) {
          const double ul = v[op->lo], uh = v[op->hi], al = a[op->lo], ah = a[op->hi];
          g[op->slot] += op->sign * (ah * ul - al * uh);
          v[op->lo] = op->c * ul + op->ss * uh;
          v[op->hi] = op->c * uh - op->ss * ul;
          a[op->lo] = op->c * al + op->ss * ah;
          a[op->hi] = op->c * ah - op->ss * al;
        }
      } else if (cp.flat) {
        for (auto op = cp.ops.rbegin(); op != cp.ops.rend(); ++op)
          g[op->slot] += unrotate_rows(op->lo, op->hi | (op->sign < 0 ? 0x80000000u : 0u), rot[op->slot]);
      } else if (len == 1) {
        for (std::size_t k = m; k-- > 0;)
          g[k] += unrotate_pairs(vd + shift, ad + shift, cp.spans[k].begin, cp.spans[k].end, rot[k]);
      } else {
        for (std::size_t k = m; k-- > 0;)
          for (auto p = cp.spans[k].begin; p != cp.spans[k].end; ++p) g[k] += unrotate_rows(p->lo, p->hi_sign, rot[k]);
      }
    }
  }
  for (std::size_t k = 0; k < m; ++k) grad[gates[k]] = 2 * g[k];
}

inline void forward_segment(const ProjectedCircuit& pc, const Segment& seg, std::span<const double> theta,
                            std::vector<double>& v) {
  double* d = v.data();
  for (std::size_t k = 0; k < seg.by_window.size(); ++k) forward_window(pc, k, seg.by_window[k], theta, d);
  for (std::size_t q : seg.rest) {
    const auto& pairs = pc.table4(q).pairs;
    rotate_pairs(d, pairs.data(), pairs.data() + pairs.size(), rotation(theta[q]));
  }
}

inline void backward_segment(const ProjectedCircuit& pc, const Segment& seg, std::span<const double> theta,
                             std::vector<double>& v, std::vector<double>& adj, std::vector<double>& grad) {
  double* vd = v.data();
  double* ad = adj.data();
  for (auto it = seg.rest.rbegin(); it != seg.rest.rend(); ++it) {
    const auto& pairs = pc.table4(*it).pairs;
    grad[*it] = 2 * unrotate_pairs(vd, ad, pairs.data(), pairs.data() + pairs.size(), rotation(theta[*it]));
  }
  for (std::size_t k = seg.by_window.size(); k-- > 0;)
    backward_window(pc, k, seg.by_window[k], theta, vd, ad, grad);
}

}  // namespace detail

/// Forward pass of the B_4 projection (and B_2 when `with_readout`).
/// Gates run segment by segment, each segment window by window, one
/// cache-sized tile at a time.
inline EvalState forward(const ProjectedCircuit& pc, std::span<const double> theta, const Bits& init,
                         const EvalOptions& opts = {}, bool with_readout = false) {
  detail::check_inputs(pc, theta, init);
  EvalState st;
  st.phi4 = project_basis_state(init, 4);
  if (with_readout) st.phi2 = project_basis_state(init, 2);
  std::size_t next_cp = 0;
  for (const Segment& seg : pc.segments()) {
    if (opts.checkpoint_stride && seg.begin >= next_cp) {
      st.checkpoints.emplace_back(seg.begin, st.phi4.coeffs);
      next_cp = seg.begin + opts.checkpoint_stride;
    }
    detail::forward_segment(pc, seg, theta, st.phi4.coeffs);
  }
  if (with_readout)
    for (std::size_t q = 0; q < pc.size(); ++q) apply_gate(st.phi2.coeffs, pc.table2(q), theta[q]);
  return st;
}

/// C(theta) = phi_out . eta.
inline double expectation(const ProjectedCircuit& pc, std::span<const double> theta, const Bits& init,
                          const ModuleVector& eta) {
  detail::check_eta(pc, eta);
  return forward(pc, theta, init).phi4.dot(eta);
}

struct ValueAndGradient {
  double value = 0;
  std::vector<double> gradient;
};

/// Cost and exact dC/dtheta by a reverse sweep. Forward states are
/// recovered by inverse rotations (reset at checkpoints when enabled); the
/// adjoint starts at eta and is pulled back through each gate's transpose.
///
/// For a pair (lo, hi, s) the rotated entries (u_lo, u_hi) have derivative
/// 2 * (-s u_hi, s u_lo), so each gate contributes
/// 2 s sum (a_hi u_lo - a_lo u_hi) against the adjoint a.
inline ValueAndGradient value_and_gradient(const ProjectedCircuit& pc, std::span<const double> theta, const Bits& init,
                                           const ModuleVector& eta, const EvalOptions& opts = {}) {
  detail::check_eta(pc, eta);
  EvalState st = forward(pc, theta, init, opts);
  ValueAndGradient out;
  out.value = st.phi4.dot(eta);
  out.gradient.assign(pc.size(), 0.0);

  std::vector<double>& v = st.phi4.coeffs;
  std::vector<double> adj = eta.coeffs;
  auto cp = st.checkpoints.rbegin();
  const auto& segs = pc.segments();
  for (auto seg = segs.rbegin(); seg != segs.rend(); ++seg) {
    detail::backward_segment(pc, *seg, theta, v, adj, out.gradient);
    if (cp != st.checkpoints.rend() && cp->first == seg->begin) {
      v.swap(cp->second);
      ++cp;
    }
  }
  return out;
}

inline std::vector<double> gradient(const ProjectedCircuit& pc, std::span<const double> theta, const Bits& init,
                                    const ModuleVector& eta, const EvalOptions& opts = {}) {
  return value_and_gradient(pc, theta, init, eta, opts).gradient;
}

/// <Z_i> for every site from the evolved B_2 projection: the coefficient on
/// {2i, 2i+1} times 2^{n/2}.
inline std::vector<double> z_expectations(const ProjectedCircuit& pc, std::span<const double> theta, const Bits& init) {
  if (!pc.has_readout()) throw std::invalid_argument("z_expectations: circuit compiled without B_2 tables");
  detail::check_inputs(pc, theta, init);
  ModuleVector phi2 = project_basis_state(init, 2);
  for (std::size_t q = 0; q < pc.size(); ++q) apply_gate(phi2.coeffs, pc.table2(q), theta[q]);
  const ModuleIndex index(pc.n(), 2);
  const double scale = std::pow(2.0, 0.5 * pc.n());
  std::vector<double> z(pc.n());
  for (std::uint32_t i = 0; i < pc.n(); ++i) {
    const std::uint32_t pair[] = {2 * i, 2 * i + 1};
    z[i] = phi2.coeffs[index.rank(pair)] * scale;
  }
  return z;
}

/// Rounds <Z_i> to bits (0 for +1, 1 for -1). Returns nullopt when any
/// |z_i| <= threshold, i.e. the state is not close to a basis state.
inline std::optional<Bits> extract_bits(std::span<const double> z, double threshold = 0.5) {
  Bits bits(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] > threshold)
      bits[i] = 0;
    else if (z[i] < -threshold)
      bits[i] = 1;
    else
      return std::nullopt;
  }
  return bits;
}

}  // namespace mgsim
