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

// Command-line front end: graph generation, solving, success tables,
// timing and the verification suite.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mgsim/experiments.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mgsim;

namespace {

struct OptimizerFlags {
  std::size_t trials = 10;
  std::string sectors = "both";
  double lr = 0.05;
  std::size_t patience = 50;
  double threshold = 1e-5;
  std::size_t checkpoint_stride = 0;
  std::uint32_t blocks = 0;
  std::size_t max_iterations = 20000;
  bool grace_per_decay = false;

  void attach(CLI::App* app) {
    app->add_option("--trials", trials, "Trials per parity sector")->check(CLI::PositiveNumber);
    app->add_option("--sectors", sectors, "Parity sectors to try")->check(CLI::IsMember({"both", "even", "odd"}));
    app->add_option("--lr", lr, "Initial Adam learning rate");
    app->add_option("--patience", patience, "Plateau patience in iterations")->check(CLI::PositiveNumber);
    app->add_option("--threshold", threshold, "Minimum cost improvement that resets the plateau counter");
    app->add_option("--checkpoint-stride", checkpoint_stride, "Gradient checkpoint stride in gates (0 = off)");
    app->add_option("--blocks", blocks, "Ansatz blocks (0 = n)");
    app->add_option("--max-iterations", max_iterations, "Iteration cap per trial")->check(CLI::PositiveNumber);
    app->add_flag("--grace-per-decay", grace_per_decay, "Restart the 100-step guard after every decay");
  }

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.max_trials_per_sector = trials;
    c.lr_initial = lr;
    c.plateau_patience = patience;
    c.improvement_threshold = threshold;
    c.checkpoint_stride = checkpoint_stride;
    c.blocks = blocks;
    c.max_iterations = max_iterations;
    c.grace_per_decay = grace_per_decay;
    c.validate();
    return c;
  }

  SectorChoice sector_choice() const {
    if (sectors == "even") return SectorChoice::Even;
    if (sectors == "odd") return SectorChoice::Odd;
    return SectorChoice::Both;
  }
};

std::vector<std::uint32_t> parse_sizes(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const unsigned long v = std::stoul(item, &used);
    if (used != item.size() || v == 0) throw std::invalid_argument("bad size '" + item + "'");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty size list");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json optional_int(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

std::string trace_csv(const RunResult& r) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,cost,lr\n";
  for (const auto& row : r.trace) out << row.iteration << ',' << row.cost << ',' << row.lr << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------

int cmd_gen_graph(std::uint32_t n, const std::string& kind, double p, std::uint64_t seed, const std::string& out) {
  const Graph g = gen_graph(n, kind == "3regular" ? GraphKind::ThreeRegular : GraphKind::ErdosRenyi, seed, p);
  if (out.empty()) {
    write_graph(g, std::cout);
  } else {
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    write_graph(g, out);
  }
  return 0;
}

int cmd_solve(const std::string& graph_path, std::uint64_t seed, const OptimizerFlags& flags,
              std::optional<std::int64_t> known_optimum, const std::string& out_dir, bool all_traces) {
  const Graph g = parse_graph(graph_path);
  const OptimizerConfig cfg = flags.config();
  const auto start = std::chrono::steady_clock::now();

  std::optional<double> ground_energy;
  std::string optimum_source = "none";
  if (known_optimum) {
    ground_energy = static_cast<double>(g.total_weight() - 2 * *known_optimum);
    optimum_source = "flag";
  } else if (g.n_vertices <= kBruteForceMaxVertices) {
    ground_energy = brute_force_maxcut(g, 1).E_g;
    optimum_source = "brute_force";
  }

  const SolveResult res = solve_instance(g, seed, cfg, ground_energy, flags.sector_choice());
  const double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const RunResult& best = res.best;
  json summary = {
      {"instance", fs::path(graph_path).filename().string()},
      {"n", g.n_vertices},
      {"edges", g.edges.size()},
      {"best_cost", best.final_cost},
      {"cut", optional_int(best.cut_value)},
      {"bits", best.bits ? json(to_string(*best.bits)) : json(nullptr)},
      {"trials", res.trials_used},
      {"iterations", res.total_iterations},
      {"success", best.success},
      {"sector", to_string(best.sector)},
      {"seed", seed},
      {"optimum_cut", ground_energy ? json((g.total_weight() - static_cast<std::int64_t>(std::llround(*ground_energy))) / 2)
                                    : json(nullptr)},
      {"optimum_source", optimum_source},
      {"wall_ms", wall_ms},
  };

  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    write_text(dir / "trace.csv", trace_csv(best));
    if (all_traces)
      for (std::size_t k = 0; k < res.runs.size(); ++k) {
        const auto& r = res.runs[k];
        write_text(dir / ("trace_" + std::to_string(k) + "_" + to_string(r.sector) + ".csv"), trace_csv(r));
      }
  }
  std::cout << summary.dump(2) << std::endl;
  return 0;
}

int cmd_success_table(const std::string& sizes_text, std::size_t instances, std::uint64_t seed,
                      const OptimizerFlags& flags, std::size_t jobs, const std::string& out) {
  const auto sizes = parse_sizes(sizes_text);
  for (auto n : sizes)
    if (n < 4 || n % 2) throw std::invalid_argument("success-table sizes must be even and >= 4");
  const auto rows = success_table(sizes, instances, seed, flags.config(), flags.sector_choice(), jobs);
  json doc = json::array();
  for (const auto& row : rows) {
    json outcomes = json::array();
    for (const auto& o : row.outcomes)
      outcomes.push_back({{"instance", o.instance},
                          {"graph_seed", o.graph_seed},
                          {"optimum_energy", o.ground_energy ? json(*o.ground_energy) : json(nullptr)},
                          {"success", o.success},
                          {"best_cost", o.best_cost},
                          {"cut", optional_int(o.cut)},
                          {"trials", o.trials_used},
                          {"iterations", o.iterations},
                          {"wall_ms", o.wall_ms}});
    doc.push_back({{"n", row.n}, {"instances", row.instances}, {"successes", row.successes}, {"rate", row.rate()},
                   {"outcomes", outcomes}});
    std::cout << "n=" << row.n << " rate=" << row.rate() << " (" << row.successes << "/" << row.instances << ")"
              << std::endl;
  }
  if (!out.empty()) write_text(out, doc.dump(2) + "\n");
  return 0;
}

int cmd_bench(const std::string& sizes_text, std::size_t reps, std::uint64_t seed, const std::string& out) {
  const auto sizes = parse_sizes(sizes_text);
  const auto rows = bench(sizes, reps, seed);
  std::ostringstream csv;
  csv << "n,gates,dim,reps,mean_ms,min_ms\n";
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    csv << r.n << ',' << r.gates << ',' << r.dim << ',' << r.reps << ',' << r.mean_ms << ',' << r.min_ms << '\n';
    xs.push_back(r.n);
    ys.push_back(r.mean_ms);
  }
  std::cout << csv.str();
  if (rows.size() >= 2) std::cout << "loglog_slope," << loglog_slope(xs, ys) << std::endl;
  if (!out.empty()) write_text(out, csv.str());
  return 0;
}

int cmd_verify(const VerifyOptions& opt, const std::string& out) {
  const auto checks = run_verification(opt);
  json doc = json::array();
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.passed;
    doc.push_back({{"name", c.name}, {"detail", c.detail}, {"measured", c.measured}, {"tolerance", c.tolerance},
                   {"passed", c.passed}});
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << c.measured << " tol=" << c.tolerance
              << std::endl;
  }
  const json report = {{"passed", ok}, {"seed", opt.seed}, {"checks", doc}};
  if (!out.empty()) write_text(out, report.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matchgate MaxCut simulator on Majorana group modules"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  std::string out;

  auto* gen = app.add_subcommand("gen-graph", "Generate a random graph file");
  std::uint32_t gen_n = 0;
  std::string gen_kind = "3regular";
  double gen_p = 0.5;
  gen->add_option("--n", gen_n, "Number of vertices")->required();
  gen->add_option("--kind", gen_kind, "Graph family")->check(CLI::IsMember({"3regular", "erdos_renyi"}));
  gen->add_option("--p", gen_p, "Edge probability for erdos_renyi");
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--out", out, "Output file (stdout when omitted)");

  auto* solve = app.add_subcommand("solve", "Optimize one instance");
  std::string graph_path;
  std::optional<std::int64_t> known_optimum;
  bool all_traces = false;
  OptimizerFlags solve_flags;
  solve->add_option("graph", graph_path, "Graph file (header 'n m', then 'u v w' lines)")->required()->check(CLI::ExistingFile);
  solve->add_option("--seed", seed, "Random seed");
  solve->add_option("--known-optimum", known_optimum, "Known optimal cut used to certify success");
  solve->add_option("--out", out, "Output directory for summary.json and trace.csv");
  solve->add_flag("--all-traces", all_traces, "Also write one trace per trial");
  solve_flags.attach(solve);

  auto* table = app.add_subcommand("success-table", "Success rate over random 3-regular instances");
  std::string table_sizes = "4,8,12";
  std::size_t instances = 10, jobs = 1;
  OptimizerFlags table_flags;
  table->add_option("--sizes", table_sizes, "Comma-separated vertex counts");
  table->add_option("--instances", instances, "Instances per size")->check(CLI::PositiveNumber);
  table->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  table->add_option("--seed", seed, "Random seed");
  table->add_option("--out", out, "Output JSON file");
  table_flags.attach(table);

  auto* bench_cmd = app.add_subcommand("bench", "Time one cost and gradient evaluation per size");
  std::string bench_sizes = "16,24,32,40,48";
  std::size_t reps = 100;
  bench_cmd->add_option("--sizes", bench_sizes, "Comma-separated vertex counts");
  bench_cmd->add_option("--reps", reps, "Repetitions per size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed, "Random seed");
  bench_cmd->add_option("--out", out, "Output CSV file");

  auto* verify = app.add_subcommand("verify", "Run the dense-oracle verification suite");
  VerifyOptions vopt;
  verify->add_option("--seed", vopt.seed, "Random seed");
  verify->add_option("--max-n", vopt.max_n, "Largest dense oracle size (4..10)");
  verify->add_option("--cases", vopt.cases_per_size, "Random cases per size");
  verify->add_flag("--inject-sign-fault", vopt.inject_sign_fault, "Corrupt gate-table signs to exercise failure");
  verify->add_option("--out", out, "Output JSON report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen_graph(gen_n, gen_kind, gen_p, seed, out);
    if (*solve) return cmd_solve(graph_path, seed, solve_flags, known_optimum, out, all_traces);
    if (*table) return cmd_success_table(table_sizes, instances, seed, table_flags, jobs, out);
    if (*bench_cmd) return cmd_bench(bench_sizes, reps, seed, out);
    if (*verify) return cmd_verify(vopt, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
