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

// Prints per-grade module weights of |0...0> and |+...+>. Basis states share
// one weight profile; |+> spreads over odd grades as well.

#include <cstdio>

#include "mgsim/modspace.hpp"

int main() {
  const std::uint32_t n = 4;
  const auto zero = mgsim::module_weights_dense(mgsim::DenseState::basis(mgsim::Bits(n, 0)));
  const auto plus = mgsim::module_weights_dense(mgsim::DenseState::plus(n));
  std::printf("kappa  |0000>    |++++>\n");
  for (std::size_t k = 0; k < zero.size(); ++k) std::printf("%5zu  %.6f  %.6f\n", k, zero[k], plus[k]);
  return 0;
}
