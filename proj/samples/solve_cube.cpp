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

// Solves MaxCut on the 3-cube and prints the convergence of the best trial.

#include <iostream>

#include "mgsim/optimize.hpp"
#include "mgsim/verify.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : std::string(MGSIM_SAMPLE_DATA) + "/cube8.txt";
  const mgsim::Graph g = mgsim::parse_graph(path);
  const mgsim::Spectrum spec = mgsim::brute_force_maxcut(g);
  std::cout << "n=" << g.n_vertices << " edges=" << g.edges.size() << " optimum cut=" << spec.optimal_cut(g) << "\n";

  const mgsim::SolveResult res = mgsim::solve_instance(g, 2026, mgsim::OptimizerConfig{}, spec.E_g);
  const auto& best = res.best;
  for (std::size_t k = 0; k < best.trace.size(); k += 50)
    std::cout << "iter " << best.trace[k].iteration << " cost " << best.trace[k].cost << " lr " << best.trace[k].lr << "\n";
  std::cout << "final cost " << best.final_cost << " after " << res.trials_used << " trial(s)\n";
  if (best.bits)
    std::cout << "bits " << mgsim::to_string(*best.bits) << " cut " << *best.cut_value << "\n";
  else
    std::cout << "readout ambiguous\n";
  return best.success ? 0 : 1;
}
