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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mgsim/circuit.hpp"
#include "mgsim/dense.hpp"
#include "mgsim/engine.hpp"
#include "mgsim/graph.hpp"
#include "mgsim/modspace.hpp"
#include "mgsim/optimize.hpp"
#include "mgsim/random.hpp"
#include "mgsim/verify.hpp"

namespace mgsim {

enum class GraphKind { ThreeRegular, ErdosRenyi };

inline Graph gen_graph(std::uint32_t n, GraphKind kind, std::uint64_t seed, double p = 0.5) {
  if (n < 4) throw GraphError("gen_graph: need n >= 4");
  return kind == GraphKind::ThreeRegular ? random_3regular(n, seed) : random_erdos_renyi(n, p, seed);
}

/// Runs `count` independent jobs on up to `workers` threads. Each job
/// writes only its own slot, so results do not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
}

// ---------------------------------------------------------------------------
// Success table

struct InstanceOutcome {
  std::uint32_t n = 0;
  std::size_t instance = 0;
  std::uint64_t graph_seed = 0;
  std::optional<double> ground_energy;
  bool success = false;
  std::size_t trials_used = 0;
  std::size_t iterations = 0;
  double best_cost = 0;
  std::optional<std::int64_t> cut;
  std::optional<Bits> bits;
  double wall_ms = 0;
};

struct SuccessRow {
  std::uint32_t n = 0;
  std::size_t instances = 0;
  std::size_t successes = 0;
  double rate() const { return instances ? static_cast<double>(successes) / static_cast<double>(instances) : 0.0; }
  std::vector<InstanceOutcome> outcomes;
};

/// Success-rate table over random 3-regular instances. An instance counts
/// as solved if any trial reaches a certified optimum. Optima come from
/// brute force when n is small enough; otherwise instances are uncertified.
inline std::vector<SuccessRow> success_table(std::span<const std::uint32_t> sizes, std::size_t instances,
                                             std::uint64_t seed, const OptimizerConfig& cfg,
                                             SectorChoice sectors = SectorChoice::Both, std::size_t workers = 1) {
  std::vector<SuccessRow> rows;
  for (auto n : sizes) {
    SuccessRow row;
    row.n = n;
    row.instances = instances;
    row.outcomes.resize(instances);
    parallel_for(instances, workers, [&](std::size_t i) {
      const auto start = std::chrono::steady_clock::now();
      InstanceOutcome& o = row.outcomes[i];
      o.n = n;
      o.instance = i;
      o.graph_seed = derive_seed(seed, n, i);
      const Graph g = random_3regular(n, o.graph_seed);
      if (n <= kBruteForceMaxVertices) o.ground_energy = brute_force_maxcut(g, 1).E_g;
      const SolveResult res = solve_instance(g, derive_seed(o.graph_seed, 0x5eed), cfg, o.ground_energy, sectors);
      o.success = res.best.success && o.ground_energy.has_value();
      o.trials_used = res.trials_used;
      o.iterations = res.total_iterations;
      o.best_cost = res.best.final_cost;
      o.cut = res.best.cut_value;
      o.bits = res.best.bits;
      o.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });
    for (const auto& o : row.outcomes) row.successes += o.success ? 1 : 0;
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Timing

struct BenchRow {
  std::uint32_t n = 0;
  std::size_t reps = 0;
  std::size_t gates = 0;
  std::uint64_t dim = 0;
  double mean_ms = 0;
  double min_ms = 0;
};

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

/// Wall time of one cost + gradient evaluation (tables prebuilt), averaged
/// over `reps` runs per size.
inline std::vector<BenchRow> bench(std::span<const std::uint32_t> sizes, std::size_t reps, std::uint64_t seed) {
  std::vector<BenchRow> rows;
  for (auto n : sizes) {
    const Graph g = random_3regular(n, derive_seed(seed, n));
    const Circuit c = build_ansatz(n, derive_seed(seed, n, 1));
    TableCache cache(n);
    const ProjectedCircuit pc(c, cache, false);
    const ModuleVector eta = project_maxcut(g);
    const Bits init(n, 0);
    BenchRow row{n, reps, pc.size(), dim_module(4, n), 0, std::numeric_limits<double>::infinity()};
    double total = 0, sink = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      sink += value_and_gradient(pc, c.theta, init, eta).value;
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      total += ms;
      row.min_ms = std::min(row.min_ms, ms);
    }
    if (!std::isfinite(sink)) throw std::runtime_error("bench: non-finite cost");
    row.mean_ms = total / static_cast<double>(std::max<std::size_t>(reps, 1));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Verification suite

struct CheckResult {
  std::string name;
  std::string detail;
  double measured = 0;
  double tolerance = 0;
  bool passed = false;
};

struct VerifyOptions {
  std::uint64_t seed = 20260101;
  std::uint32_t max_n = 10;          // largest dense oracle size
  std::size_t cases_per_size = 20;
  std::size_t gradient_instances = 5;
  std::size_t remark_pairs = 50;
  std::size_t theorem_samples = 200;
  bool inject_sign_fault = false;    // corrupt one B_4 table sign
};

/// Max |projected - dense| over random (3-regular graph, ansatz, theta)
/// cases of size n.
inline double oracle_equivalence_error(std::uint32_t n, std::size_t cases, std::uint64_t seed,
                                       bool inject_sign_fault = false) {
  double worst = 0;
  TableCache cache(n);
  for (std::size_t k = 0; k < cases; ++k) {
    const Graph g = random_3regular(n, derive_seed(seed, n, 2 * k));
    const Circuit c = build_ansatz(n, derive_seed(seed, n, 2 * k + 1));
    ProjectedCircuit pc(c, cache, false);
    if (inject_sign_fault) {
      // Flipping every sign of the last gate turns it into its inverse.
      GateTable t = pc.table4(pc.size() - 1);
      for (std::size_t i = 0; i < t.pairs.size(); ++i) t.flip_sign(i);
      pc.replace_table4(pc.size() - 1, std::move(t));
    }
    const Bits init(n, 0);
    const double projected = expectation(pc, c.theta, init, project_maxcut(g));
    const double dense = dense_expectation(c, c.theta, DenseState::basis(init), maxcut_hamiltonian(g));
    worst = std::max(worst, std::abs(projected - dense));
  }
  return worst;
}

/// Max relative deviation of the reverse-mode gradient from central
/// differences with step h; relative to max(|fd|, 1).
inline double gradient_fd_error(std::uint32_t n, std::uint64_t seed, double h = 1e-5) {
  const Graph g = random_3regular(n, derive_seed(seed, n, 7));
  const Circuit c = build_ansatz(n, derive_seed(seed, n, 8));
  TableCache cache(n);
  const ProjectedCircuit pc(c, cache, false);
  const ModuleVector eta = project_maxcut(g);
  const Bits init(n, 0);
  const auto grad = gradient(pc, c.theta, init, eta);
  std::vector<double> th = c.theta;
  double worst = 0;
  for (std::size_t q = 0; q < th.size(); ++q) {
    const double t0 = th[q];
    th[q] = t0 + h;
    const double up = expectation(pc, th, init, eta);
    th[q] = t0 - h;
    const double dn = expectation(pc, th, init, eta);
    th[q] = t0;
    const double fd = (up - dn) / (2 * h);
    worst = std::max(worst, std::abs(grad[q] - fd) / std::max(std::abs(fd), 1.0));
  }
  return worst;
}

inline std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
  if (opt.max_n < 4 || opt.max_n > 10) throw CapacityError("verify: max-n must lie in 4..10");
  std::vector<CheckResult> out;
  auto add = [&](std::string name, std::string detail, double measured, double tol, bool le = true) {
    out.push_back({std::move(name), std::move(detail), measured, tol, le ? measured <= tol : measured >= tol});
  };

  for (std::uint32_t n = 4; n <= opt.max_n; n += 2)
    add("oracle_equivalence_n" + std::to_string(n), "max |projected - dense| over random cases",
        oracle_equivalence_error(n, opt.cases_per_size, opt.seed, opt.inject_sign_fault), 1e-9);

  double grad_worst = 0;
  for (std::size_t k = 0; k < opt.gradient_instances; ++k)
    grad_worst = std::max(grad_worst, gradient_fd_error(6, derive_seed(opt.seed, 100 + k)));
  add("gradient_finite_difference_n6", "max relative error vs central differences, h=1e-5", grad_worst, 1e-5);

  for (std::uint32_t n : {4u, 8u}) {
    if (n > opt.max_n) continue;
    const RemarkReport r = remark_check(n, opt.remark_pairs, derive_seed(opt.seed, 200 + n));
    add("remark_weights_n" + std::to_string(n), "computational basis pairs: per-grade weight deviation",
        std::max(r.max_pair_deviation, r.max_closed_form_deviation), 1e-12);
  }

  for (std::uint32_t n : {4u, 6u}) {
    if (n > opt.max_n) continue;
    const Graph g = random_3regular(n, derive_seed(opt.seed, 300 + n));
    const DiagonalHamiltonian h = symmetry_broken_maxcut(g);
    const ReachabilityReport r = reachability_check(h, DenseState::plus(n), opt.theorem_samples, derive_seed(opt.seed, 400 + n));
    add("theorem_bound_n" + std::to_string(n), "min sampled cost - bound (|+> input)", r.min_sampled_cost - r.bound, -1e-9,
        false);
    const ReachabilityReport rb =
        reachability_check(h, DenseState::basis(Bits(n, 0)), 1, derive_seed(opt.seed, 500 + n));
    double dev = 0;
    for (std::size_t k = 0; k < rb.weights_initial.size(); ++k)
      dev = std::max(dev, std::abs(rb.weights_initial[k] - rb.weights_ground[k]));
    add("theorem_equal_weights_n" + std::to_string(n), "basis input vs ground: per-grade weight deviation", dev, 1e-12);
  }
  return out;
}

}  // namespace mgsim
