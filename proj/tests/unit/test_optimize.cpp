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

#include "mgsim/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace mgsim;

TEST(optimize, config_validation) {
  OptimizerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lr_min = 0.1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.decay_factor = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(optimize, adam_examples) {
  {
    std::vector<double> p{0.3, -1.2}, g{0, 0};
    AdamState st(2);
    adam_step(p, g, st, 0.05);
    EXPECT_EQ(p, (std::vector<double>{0.3, -1.2}));
  }
  {
    // Bias-corrected first step: m_hat = g, v_hat = g^2.
    for (double g : {1e-3, 0.7, 42.0}) {
      std::vector<double> p{1.0}, gr{g};
      AdamState st(1);
      adam_step(p, gr, st, 0.05);
      EXPECT_NEAR(p[0], 1.0 - 0.05 * g / (g + 1e-8), 1e-15);
    }
  }
  {
    std::vector<double> p{0.0}, g{-2.5};
    AdamState st(1);
    double prev = p[0];
    for (int k = 0; k < 5; ++k) {
      adam_step(p, g, st, 0.01);
      EXPECT_GT(p[0], prev);
      prev = p[0];
    }
  }
  {
    // Independent recomputation of three steps with a varying gradient.
    const double grads[] = {0.4, -0.1, 0.25};
    double m = 0, v = 0, x = 0.5;
    std::vector<double> p{0.5};
    AdamState st(1);
    for (int t = 1; t <= 3; ++t) {
      const double g = grads[t - 1];
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      x -= 0.02 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
      std::vector<double> gv{g};
      adam_step(p, gv, st, 0.02);
      EXPECT_NEAR(p[0], x, 1e-15);
    }
  }
  std::vector<double> p(2), g(3);
  AdamState st(2);
  EXPECT_THROW(adam_step(p, g, st, 0.1), std::invalid_argument);
}

TEST(optimize, plateau_flat_trace_decays_once) {
  OptimizerConfig cfg;
  ScheduleState st(cfg.lr_initial);
  const std::vector<double> flat(160, 3.0);
  EXPECT_EQ(plateau_schedule(flat, st, cfg), ScheduleAction::Decay);
  EXPECT_DOUBLE_EQ(st.lr, 0.025);
  EXPECT_EQ(st.decays, 1u);
}

TEST(optimize, plateau_guard_and_patience) {
  OptimizerConfig cfg;
  ScheduleState st(cfg.lr_initial);
  std::vector<double> trace;
  std::size_t first_decay = 0;
  for (std::size_t t = 1; t <= 400 && !first_decay; ++t) {
    trace.push_back(1.0);
    if (plateau_schedule(trace, st, cfg) == ScheduleAction::Decay) first_decay = t;
  }
  EXPECT_EQ(first_decay, 100u);  // flat since step 1, guard releases at 100
  // The next decay needs another full patience window.
  std::size_t second = 0;
  for (std::size_t t = trace.size() + 1; t <= 400 && !second; ++t) {
    trace.push_back(1.0);
    if (plateau_schedule(trace, st, cfg) == ScheduleAction::Decay) second = t;
  }
  EXPECT_EQ(second, 150u);
  EXPECT_DOUBLE_EQ(st.lr, 0.0125);
}

TEST(optimize, grace_per_decay_switch) {
  OptimizerConfig cfg;
  cfg.grace_per_decay = true;
  ScheduleState st(cfg.lr_initial);
  std::vector<double> trace;
  std::vector<std::size_t> events;
  for (std::size_t t = 1; t <= 320; ++t) {
    trace.push_back(1.0);
    if (plateau_schedule(trace, st, cfg) == ScheduleAction::Decay) events.push_back(t);
  }
  EXPECT_EQ(events, (std::vector<std::size_t>{100, 200, 300}));
}

TEST(optimize, improving_trace_keeps_lr) {
  OptimizerConfig cfg;
  ScheduleState st(cfg.lr_initial);
  std::vector<double> trace;
  for (int t = 0; t < 500; ++t) {
    trace.push_back(-1e-3 * t);
    EXPECT_EQ(plateau_schedule(trace, st, cfg), ScheduleAction::Continue);
  }
  EXPECT_DOUBLE_EQ(st.lr, 0.05);
  // Improvements below the threshold do not count.
  ScheduleState slow(cfg.lr_initial);
  std::vector<double> tiny;
  for (int t = 0; t < 160; ++t) tiny.push_back(-1e-7 * t);
  EXPECT_EQ(plateau_schedule(tiny, slow, cfg), ScheduleAction::Decay);
}

TEST(optimize, lr_sequence_and_termination) {
  OptimizerConfig cfg;
  ScheduleState st(cfg.lr_initial);
  std::vector<double> trace;
  std::vector<double> lrs{st.lr};
  ScheduleAction act = ScheduleAction::Continue;
  while (trace.size() < 5000) {
    trace.push_back(0.0);
    act = plateau_schedule(trace, st, cfg);
    if (act == ScheduleAction::Decay) lrs.push_back(st.lr);
    if (act == ScheduleAction::Terminate) break;
  }
  EXPECT_EQ(act, ScheduleAction::Terminate);
  const std::vector<double> expected{0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625, 0.001};
  ASSERT_EQ(lrs.size(), expected.size());
  for (std::size_t k = 0; k < lrs.size(); ++k) EXPECT_DOUBLE_EQ(lrs[k], expected[k]);

  ScheduleState at_min(0.001);
  const std::vector<double> flat(200, 1.0);
  EXPECT_EQ(plateau_schedule(flat, at_min, cfg), ScheduleAction::Terminate);
  EXPECT_THROW(plateau_schedule(std::vector<double>{}, at_min, cfg), std::invalid_argument);
}

TEST(optimize, single_edge_odd_sector_reaches_minus_one) {
  Graph g{2, {{1, 2, 1}}};
  OptimizerConfig cfg;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto r = run_trial(g, Sector::Odd, seed, cfg, -1.0);
    EXPECT_NEAR(r.final_cost, -1.0, 1e-4);
    // Any a|10> + b|01> is optimal here, so the readout may be ambiguous.
    if (r.bits) {
      EXPECT_EQ(*r.cut_value, 1);
      EXPECT_TRUE(r.success);
    }
  }
  // The even sector conserves parity, so Z1Z2 stays at +1.
  const auto even = run_trial(g, Sector::Even, 0, cfg, -1.0);
  EXPECT_NEAR(even.final_cost, 1.0, 1e-9);
  EXPECT_FALSE(even.success);
}

TEST(optimize, run_trial_invariants_and_determinism) {
  const auto g = random_3regular(6, 11);
  OptimizerConfig cfg;
  const auto a = run_trial(g, Sector::Even, 123, cfg);
  const auto b = run_trial(g, Sector::Even, 123, cfg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].cost, b.trace[k].cost);
    EXPECT_EQ(a.trace[k].lr, b.trace[k].lr);
  }
  EXPECT_EQ(a.final_cost, a.trace.back().cost);
  EXPECT_EQ(a.iterations, a.trace.size());
  double prev = a.trace.front().lr;
  const std::set<double> allowed{0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625, 0.001};
  for (const auto& row : a.trace) {
    EXPECT_TRUE(std::isfinite(row.cost));
    EXPECT_LE(row.lr, prev);
    EXPECT_TRUE(allowed.count(row.lr));
    prev = row.lr;
  }
  if (a.bits) {
    EXPECT_EQ(*a.cut_value * 2, static_cast<std::int64_t>(g.total_weight()) - *a.energy);
  }
}

TEST(optimize, k4_solves) {
  // K4 is the only 3-regular graph on four vertices: optimum cut 4, E_g = -2.
  Graph k4{4, {{1, 2, 1}, {1, 3, 1}, {1, 4, 1}, {2, 3, 1}, {2, 4, 1}, {3, 4, 1}}};
  const auto res = solve_instance(k4, 5, OptimizerConfig{}, -2.0);
  EXPECT_TRUE(res.best.success);
  EXPECT_EQ(*res.best.cut_value, 4);
  EXPECT_LE(res.trials_used, 20u);
}

TEST(optimize, solve_small_examples) {
  OptimizerConfig cfg;
  Graph tri{3, {{1, 2, 1}, {2, 3, 1}, {1, 3, 1}}};
  const auto t = solve_instance(tri, 1, cfg, -1.0);
  EXPECT_TRUE(t.best.success);
  EXPECT_EQ(*t.best.cut_value, 2);
  EXPECT_NEAR(t.best.final_cost, -1.0, 1e-4);

  Graph c4{4, {{1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {1, 4, 1}}};
  const auto c = solve_instance(c4, 1, cfg, -4.0);
  EXPECT_TRUE(c.best.success);
  EXPECT_EQ(*c.best.cut_value, 4);
  EXPECT_NEAR(c.best.final_cost, -4.0, 1e-4);

  Graph empty{5, {}};
  const auto e = solve_instance(empty, 1, cfg);
  EXPECT_TRUE(e.best.success);
  EXPECT_EQ(*e.best.cut_value, 0);
  EXPECT_EQ(e.best.final_cost, 0.0);
  EXPECT_EQ(e.trials_used, 0u);
}

TEST(optimize, solve_stops_at_first_success_in_canonical_order) {
  Graph tri{3, {{1, 2, 1}, {2, 3, 1}, {1, 3, 1}}};
  OptimizerConfig cfg;
  const auto res = solve_instance(tri, 9, cfg, -1.0);
  ASSERT_FALSE(res.runs.empty());
  for (std::size_t k = 0; k + 1 < res.runs.size(); ++k) EXPECT_FALSE(res.runs[k].success);
  EXPECT_TRUE(res.runs.back().success);
  for (std::size_t k = 0; k < res.runs.size(); ++k) {
    EXPECT_EQ(res.runs[k].sector, k % 2 == 0 ? Sector::Even : Sector::Odd);
    EXPECT_EQ(res.runs[k].seed, derive_seed(9, k / 2, k % 2));
  }
  const auto odd_only = solve_instance(tri, 9, cfg, -1.0, SectorChoice::Odd);
  for (const auto& r : odd_only.runs) EXPECT_EQ(r.sector, Sector::Odd);
}
