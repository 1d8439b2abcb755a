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

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace mgsim {

/// Exact C(n, k); throws on 64-bit overflow.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    r = r * (n - k + j) / j;
    if (r > UINT64_MAX) throw std::overflow_error("binomial: result exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

/// Precomputed C(a, j) for a < rows, j <= max_k. Backs the colexicographic
/// rank/unrank of k-subsets of {0, ..., rows-1}.
class BinomialTable {
 public:
  BinomialTable() = default;
  BinomialTable(std::uint32_t rows, std::uint32_t max_k) : rows_(rows), cols_(max_k + 1), c_(rows * (max_k + 1), 0) {
    for (std::uint32_t a = 0; a < rows; ++a)
      for (std::uint32_t j = 0; j <= max_k; ++j) c_[a * cols_ + j] = binomial(a, j);
  }

  std::uint32_t rows() const { return rows_; }
  std::uint32_t max_k() const { return cols_ - 1; }

  std::uint64_t operator()(std::uint32_t a, std::uint32_t j) const { return c_[a * cols_ + j]; }

  /// Colex rank: sum_j C(a_j, j+1) over the strictly increasing tuple.
  std::uint64_t rank(std::span<const std::uint32_t> subset) const {
    if (subset.size() > max_k()) throw std::invalid_argument("rank: subset larger than table");
    std::uint64_t r = 0;
    for (std::uint32_t j = 0; j < subset.size(); ++j) {
      if (subset[j] >= rows_ || (j > 0 && subset[j] <= subset[j - 1]))
        throw std::invalid_argument("rank: malformed subset");
      r += (*this)(subset[j], j + 1);
    }
    return r;
  }

  /// Inverse of rank for k-subsets of {0, ..., rows-1}.
  std::vector<std::uint32_t> unrank(std::uint64_t r, std::uint32_t k) const {
    if (k > max_k()) throw std::invalid_argument("unrank: k larger than table");
    if (r >= binomial(rows_, k)) throw std::out_of_range("unrank: rank out of range");
    std::vector<std::uint32_t> out(k);
    std::uint32_t hi = rows_;
    for (std::uint32_t j = k; j-- > 0;) {
      // Largest a < hi with C(a, j+1) <= r.
      std::uint32_t a = hi - 1;
      while ((*this)(a, j + 1) > r) --a;
      out[j] = a;
      r -= (*this)(a, j + 1);
      hi = a;
    }
    return out;
  }

 private:
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<std::uint64_t> c_;
};

/// Advances a strictly increasing k-subset of {0, ..., universe-1} to its
/// colex successor. Returns false after the last subset.
inline bool next_colex(std::span<std::uint32_t> subset, std::uint32_t universe) {
  const std::size_t k = subset.size();
  for (std::size_t j = 0; j < k; ++j) {
    const std::uint32_t limit = (j + 1 < k) ? subset[j + 1] : universe;
    if (subset[j] + 1 < limit) {
      ++subset[j];
      for (std::size_t i = 0; i < j; ++i) subset[i] = static_cast<std::uint32_t>(i);
      return true;
    }
  }
  return false;
}

}  // namespace mgsim
