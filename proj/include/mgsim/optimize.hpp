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
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mgsim/circuit.hpp"
#include "mgsim/engine.hpp"
#include "mgsim/graph.hpp"
#include "mgsim/modspace.hpp"
#include "mgsim/random.hpp"

namespace mgsim {

struct OptimizerConfig {
  double lr_initial = 0.05;
  double decay_factor = 0.5;
  double lr_min = 0.001;
  std::size_t plateau_patience = 50;
  double improvement_threshold = 1e-5;
  std::size_t min_steps_before_decay = 100;
  /// false: the min-steps guard counts from the start of the run only.
  /// true: every decay opens a fresh min-steps window.
  bool grace_per_decay = false;
  std::size_t max_trials_per_sector = 10;
  std::size_t max_iterations = 20000;

  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  double readout_threshold = 0.5;
  std::size_t checkpoint_stride = 0;
  std::uint32_t blocks = 0;  // 0: n blocks

  void validate() const {
    if (!(lr_initial > lr_min && lr_min > 0)) throw std::invalid_argument("OptimizerConfig: need lr_initial > lr_min > 0");
    if (!(decay_factor > 0 && decay_factor < 1)) throw std::invalid_argument("OptimizerConfig: decay_factor must lie in (0,1)");
    if (plateau_patience == 0) throw std::invalid_argument("OptimizerConfig: patience must be positive");
  }
};

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

/// One bias-corrected Adam update of `params` in place.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& st, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  if (params.size() != grads.size() || st.m.size() != params.size() || st.v.size() != params.size())
    throw std::invalid_argument("adam_step: length mismatch");
  ++st.step;
  const double bc1 = 1 - std::pow(beta1, static_cast<double>(st.step));
  const double bc2 = 1 - std::pow(beta2, static_cast<double>(st.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    st.m[k] = beta1 * st.m[k] + (1 - beta1) * grads[k];
    st.v[k] = beta2 * st.v[k] + (1 - beta2) * grads[k] * grads[k];
    const double mhat = st.m[k] / bc1;
    const double vhat = st.v[k] / bc2;
    params[k] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

// ---------------------------------------------------------------------------
// Plateau-triggered learning-rate decay

enum class ScheduleAction { Continue, Decay, Terminate };

struct ScheduleState {
  double lr = 0.05;
  double best = std::numeric_limits<double>::infinity();
  std::size_t consumed = 0;           // trace entries seen
  std::size_t last_improvement = 0;   // trace length at the last significant improvement
  std::size_t last_event = 0;         // trace length at the last decay
  std::size_t decays = 0;

  explicit ScheduleState(double lr0 = 0.05) : lr(lr0) {}
};

/// Consumes the unseen tail of `trace` and decides on the learning rate.
/// A decay happens when the best cost has not dropped by more than the
/// threshold for `patience` iterations (counted from the later of the last
/// improvement and the last decay) and the min-steps guard is met. At
/// lr_min the same condition terminates the run. Decays clip at lr_min.
inline ScheduleAction plateau_schedule(std::span<const double> trace, ScheduleState& st, const OptimizerConfig& cfg) {
  if (trace.empty()) throw std::invalid_argument("plateau_schedule: empty trace");
  for (; st.consumed < trace.size(); ++st.consumed) {
    const double c = trace[st.consumed];
    if (c < st.best - cfg.improvement_threshold) {
      st.best = c;
      st.last_improvement = st.consumed + 1;
    }
  }
  const std::size_t t = trace.size();
  const std::size_t since = t - std::max(st.last_improvement, st.last_event);
  const bool guard = cfg.grace_per_decay ? (t - st.last_event >= cfg.min_steps_before_decay)
                                         : (t >= cfg.min_steps_before_decay);
  if (since < cfg.plateau_patience || !guard) return ScheduleAction::Continue;
  if (st.lr <= cfg.lr_min * (1 + 1e-12)) return ScheduleAction::Terminate;
  st.lr = std::max(st.lr * cfg.decay_factor, cfg.lr_min);
  st.last_event = t;
  ++st.decays;
  return ScheduleAction::Decay;
}

// ---------------------------------------------------------------------------
// Trials

/// Parity sector of the initial state: |0...0> or X_1|0...0>.
enum class Sector { Even, Odd };

inline const char* to_string(Sector s) { return s == Sector::Even ? "even" : "odd"; }

inline Bits initial_bits(std::uint32_t n, Sector s) {
  Bits b(n, 0);
  if (s == Sector::Odd) b[0] = 1;
  return b;
}

struct TraceRow {
  std::size_t iteration;
  double cost;
  double lr;
};

struct RunResult {
  std::vector<TraceRow> trace;
  double final_cost = 0;
  std::optional<Bits> bits;
  std::optional<std::int64_t> cut_value;
  std::optional<std::int64_t> energy;  // classical energy of `bits`
  bool success = false;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  Sector sector = Sector::Even;
};

/// Optimizes one seeded ansatz from the sector's initial state until the
/// schedule terminates, then reads out <Z_i>. `ground_energy`, when given,
/// is the known minimum of sum w z_i z_j used to certify optimality.
inline RunResult run_trial(const Graph& g, Sector sector, std::uint64_t seed, const OptimizerConfig& cfg,
                           std::optional<double> ground_energy = std::nullopt, TableCache* cache = nullptr) {
  cfg.validate();
  std::optional<TableCache> own;
  if (!cache) cache = &own.emplace(g.n_vertices);
  const Circuit circuit = build_ansatz(g.n_vertices, seed, cfg.blocks);
  const ProjectedCircuit pc(circuit, *cache);
  const ModuleVector eta = project_maxcut(g);
  const Bits init = initial_bits(g.n_vertices, sector);
  const EvalOptions eval{cfg.checkpoint_stride};

  RunResult r;
  r.seed = seed;
  r.sector = sector;
  std::vector<double> theta = circuit.theta;
  AdamState adam(theta.size());
  ScheduleState sched(cfg.lr_initial);
  std::vector<double> costs;

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    ValueAndGradient vg = value_and_gradient(pc, theta, init, eta, eval);
    if (!std::isfinite(vg.value)) throw std::runtime_error("run_trial: non-finite cost");
    costs.push_back(vg.value);
    r.trace.push_back({it, vg.value, sched.lr});
    const ScheduleAction act = plateau_schedule(costs, sched, cfg);
    if (act == ScheduleAction::Terminate) break;
    adam_step(theta, vg.gradient, adam, sched.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
  }
  r.iterations = r.trace.size();
  r.final_cost = r.trace.empty() ? 0.0 : r.trace.back().cost;

  const std::vector<double> z = z_expectations(pc, theta, init);
  r.bits = extract_bits(z, cfg.readout_threshold);
  if (r.bits) {
    r.energy = classical_energy(g, *r.bits);
    r.cut_value = cut_value(g, *r.bits);
    const double rounded = std::round(r.final_cost);
    const bool consistent = std::abs(static_cast<double>(*r.energy) - rounded) <= 1e-6;
    const bool optimal = !ground_energy || std::abs(rounded - *ground_energy) <= 1e-6;
    r.success = consistent && optimal;
  }
  return r;
}

struct SolveResult {
  RunResult best;
  std::size_t trials_used = 0;
  std::size_t total_iterations = 0;
  std::vector<RunResult> runs;  // in execution order
};

enum class SectorChoice { Both, Even, Odd };

inline std::vector<Sector> sectors_of(SectorChoice c) {
  switch (c) {
    case SectorChoice::Even: return {Sector::Even};
    case SectorChoice::Odd: return {Sector::Odd};
    default: return {Sector::Even, Sector::Odd};
  }
}

/// Runs trial t = 0, 1, ... in each selected sector (even before odd) and
/// stops at the first success. Seeds derive from (seed, t, sector). The
/// reported best run is the first success, else the lowest final cost.
inline SolveResult solve_instance(const Graph& g, std::uint64_t seed, const OptimizerConfig& cfg,
                                  std::optional<double> ground_energy = std::nullopt,
                                  SectorChoice sectors = SectorChoice::Both) {
  SolveResult out;
  if (g.edges.empty()) {
    out.best.bits = Bits(g.n_vertices, 0);
    out.best.cut_value = 0;
    out.best.energy = 0;
    out.best.success = true;
    return out;
  }
  TableCache cache(g.n_vertices);
  std::optional<std::size_t> best_idx;
  for (std::size_t t = 0; t < cfg.max_trials_per_sector; ++t) {
    for (Sector s : sectors_of(sectors)) {
      RunResult r = run_trial(g, s, derive_seed(seed, t, static_cast<std::uint64_t>(s)), cfg, ground_energy, &cache);
      out.total_iterations += r.iterations;
      out.runs.push_back(std::move(r));
      ++out.trials_used;
      const RunResult& last = out.runs.back();
      if (last.success) {
        out.best = last;
        return out;
      }
      if (!best_idx || last.final_cost < out.runs[*best_idx].final_cost) best_idx = out.runs.size() - 1;
    }
  }
  if (best_idx) out.best = out.runs[*best_idx];
  return out;
}

}  // namespace mgsim
