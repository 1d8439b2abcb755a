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
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mgsim {

/// Single-qubit Pauli letter in symplectic form: bit 0 is the x-bit, bit 1
/// the z-bit, so Y = X|Z.
enum class Pauli : std::uint8_t { I = 0, X = 1, Z = 2, Y = 3 };

inline char to_char(Pauli p) {
  constexpr char table[] = {'I', 'X', 'Z', 'Y'};
  return table[static_cast<int>(p)];
}

/// n-site Pauli word i^phase * P_1 (x) ... (x) P_n.
///
/// Letters are packed into x/z bit planes so products and commutation
/// checks are word-parallel. The phase is an exact exponent of i in
/// {0,1,2,3}; with phase 0 the operator is Hermitian.
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::size_t num_qubits)
      : n_(num_qubits), xs_(word_count(num_qubits), 0), zs_(word_count(num_qubits), 0) {
    if (num_qubits == 0) throw std::invalid_argument("PauliString: qubit count must be positive");
  }

  /// Parses text like "+iXYZ", "-ZZ", "XI_Z" ('_' is I). Optional sign and
  /// 'i' prefix select the phase.
  static PauliString from_text(std::string_view text) {
    std::uint8_t phase = 0;
    std::size_t pos = 0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') phase = 2;
      ++pos;
    }
    if (pos < text.size() && text[pos] == 'i') {
      phase = static_cast<std::uint8_t>((phase + 1) & 3);
      ++pos;
    }
    std::string_view letters = text.substr(pos);
    PauliString out(letters.size());
    for (std::size_t q = 0; q < letters.size(); ++q) {
      switch (letters[q]) {
        case 'I': case '_': break;
        case 'X': out.set(q, Pauli::X); break;
        case 'Y': out.set(q, Pauli::Y); break;
        case 'Z': out.set(q, Pauli::Z); break;
        default: throw std::invalid_argument("PauliString: bad letter in '" + std::string(text) + "'");
      }
    }
    out.phase_ = phase;
    return out;
  }

  std::size_t num_qubits() const { return n_; }
  std::uint8_t phase() const { return phase_; }
  void set_phase(std::uint8_t p) { phase_ = static_cast<std::uint8_t>(p & 3); }

  Pauli letter(std::size_t q) const {
    check_site(q);
    unsigned x = (xs_[q / 64] >> (q % 64)) & 1u;
    unsigned z = (zs_[q / 64] >> (q % 64)) & 1u;
    return static_cast<Pauli>(x | (z << 1));
  }

  void set(std::size_t q, Pauli p) {
    check_site(q);
    const std::uint64_t bit = std::uint64_t{1} << (q % 64);
    auto v = static_cast<unsigned>(p);
    xs_[q / 64] = (v & 1u) ? (xs_[q / 64] | bit) : (xs_[q / 64] & ~bit);
    zs_[q / 64] = (v & 2u) ? (zs_[q / 64] | bit) : (zs_[q / 64] & ~bit);
  }

  std::span<const std::uint64_t> xs() const { return xs_; }
  std::span<const std::uint64_t> zs() const { return zs_; }

  /// Resets to the identity word with phase +1, keeping the size.
  void clear() {
    std::fill(xs_.begin(), xs_.end(), 0);
    std::fill(zs_.begin(), zs_.end(), 0);
    phase_ = 0;
  }

  /// Overwrites with the Jordan-Wigner word Z...Z X (or Y) at `site`,
  /// phase +1.
  void assign_jordan_wigner(std::size_t site, bool y) {
    check_site(site);
    std::fill(xs_.begin(), xs_.end(), 0);
    const std::size_t w = site / 64, b = site % 64;
    for (std::size_t k = 0; k < zs_.size(); ++k) zs_[k] = k < w ? ~std::uint64_t{0} : 0;
    zs_[w] = (std::uint64_t{1} << b) - 1;
    xs_[w] |= std::uint64_t{1} << b;
    if (y) zs_[w] |= std::uint64_t{1} << b;
    phase_ = 0;
  }

  /// True when the word contains only I and Z letters.
  bool is_diagonal() const {
    for (auto w : xs_)
      if (w != 0) return false;
    return true;
  }

  std::size_t weight() const {
    std::size_t w = 0;
    for (std::size_t k = 0; k < xs_.size(); ++k) w += std::popcount(xs_[k] | zs_[k]);
    return w;
  }

  bool same_letters(const PauliString& o) const { return n_ == o.n_ && xs_ == o.xs_ && zs_ == o.zs_; }

  bool operator==(const PauliString& o) const { return same_letters(o) && phase_ == o.phase_; }

  /// In-place right multiplication: *this = *this * rhs. Does not allocate.
  PauliString& operator*=(const PauliString& rhs) {
    if (rhs.n_ != n_) throw std::invalid_argument("PauliString: mismatched qubit counts");
    // Per-site i-exponent of sigma(x1,z1) * sigma(x2,z2) is +1 or -1 on
    // the sites counted below, zero elsewhere.
    int acc = 0;
    for (std::size_t k = 0; k < xs_.size(); ++k) {
      const std::uint64_t x1 = xs_[k], z1 = zs_[k], x2 = rhs.xs_[k], z2 = rhs.zs_[k];
      const std::uint64_t y1 = x1 & z1, xo1 = x1 & ~z1, zo1 = z1 & ~x1;
      const std::uint64_t y2 = x2 & z2, xo2 = x2 & ~z2, zo2 = z2 & ~x2;
      const std::uint64_t plus = (y1 & zo2) | (xo1 & y2) | (zo1 & xo2);
      const std::uint64_t minus = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
      acc += std::popcount(plus) - std::popcount(minus);
      xs_[k] = x1 ^ x2;
      zs_[k] = z1 ^ z2;
    }
    phase_ = static_cast<std::uint8_t>((phase_ + rhs.phase_ + (acc & 3)) & 3);
    return *this;
  }

  friend PauliString operator*(PauliString a, const PauliString& b) { return a *= b; }

  /// Text form with phase prefix: "+", "+i", "-", "-i".
  std::string str() const {
    static constexpr const char* prefix[] = {"+", "+i", "-", "-i"};
    std::string out = prefix[phase_];
    for (std::size_t q = 0; q < n_; ++q) out.push_back(to_char(letter(q)));
    return out;
  }

 private:
  static std::size_t word_count(std::size_t n) { return (n + 63) / 64; }
  void check_site(std::size_t q) const {
    if (q >= n_) throw std::out_of_range("PauliString: site out of range");
  }

  std::size_t n_ = 0;
  std::uint8_t phase_ = 0;
  std::vector<std::uint64_t> xs_;
  std::vector<std::uint64_t> zs_;
};

/// Index of one of the 2n Majorana operators: value = 2*site + flavor, with
/// flavor 0 for c^X and 1 for c^Y (sites 0-based).
struct MajoranaIndex {
  std::uint32_t value = 0;

  constexpr std::uint32_t site() const { return value / 2; }
  constexpr bool is_y() const { return (value & 1u) != 0; }
  friend constexpr auto operator<=>(MajoranaIndex, MajoranaIndex) = default;
};

/// True iff a*b = -b*a.
inline bool anticommutes(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("anticommutes: mismatched qubit counts");
  auto ax = a.xs(), az = a.zs(), bx = b.xs(), bz = b.zs();
  int parity = 0;
  for (std::size_t k = 0; k < ax.size(); ++k) parity ^= std::popcount((ax[k] & bz[k]) ^ (az[k] & bx[k])) & 1;
  return parity != 0;
}

/// Overwrites `out` (already sized to n) with the Jordan-Wigner string of
/// the Majorana operator: Z on earlier sites, X or Y on its own site.
inline void assign_majorana(PauliString& out, std::uint32_t index) {
  const std::size_t n = out.num_qubits();
  if (index >= 2 * n) throw std::out_of_range("majorana index out of range");
  out.assign_jordan_wigner(index / 2, (index & 1u) != 0);
}

inline PauliString majorana_pauli(MajoranaIndex idx, std::size_t n) {
  PauliString out(n);
  assign_majorana(out, idx.value);
  return out;
}

namespace detail {

inline void check_strictly_increasing(std::span<const std::uint32_t> indices, std::size_t n) {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= 2 * n) throw std::out_of_range("majorana_product: index out of range");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw std::invalid_argument("majorana_product: indices must be strictly increasing");
  }
}

}  // namespace detail

/// Left-to-right product c_{i1} c_{i2} ... using caller-provided buffers,
/// so repeated calls do not allocate. `out` and `scratch` must have n qubits.
inline void assign_majorana_product(PauliString& out, PauliString& scratch,
                                    std::span<const std::uint32_t> indices) {
  detail::check_strictly_increasing(indices, out.num_qubits());
  out.clear();
  for (auto i : indices) {
    assign_majorana(scratch, i);
    out *= scratch;
  }
}

inline PauliString majorana_product(std::span<const std::uint32_t> indices, std::size_t n) {
  PauliString out(n), scratch(n);
  assign_majorana_product(out, scratch, indices);
  return out;
}

inline PauliString majorana_product(std::initializer_list<std::uint32_t> indices, std::size_t n) {
  return majorana_product(std::span<const std::uint32_t>(indices.begin(), indices.size()), n);
}

/// Majorana support of a Pauli word: the unique strictly increasing index
/// set S and exponent k with P = i^k * prod_{s in S} c_s.
struct MajoranaSupport {
  std::vector<std::uint32_t> indices;
  std::uint8_t phase = 0;
};

/// Number of Majorana factors of a Pauli word (its module grade).
inline std::size_t majorana_grade(const PauliString& p) {
  std::size_t count = 0;
  unsigned tail = 0;
  for (std::size_t q = p.num_qubits(); q-- > 0;) {
    auto v = static_cast<unsigned>(p.letter(q));
    if (tail & 1u) v ^= static_cast<unsigned>(Pauli::Z);
    const unsigned own = (v == static_cast<unsigned>(Pauli::Z)) ? 2u : (v != 0 ? 1u : 0u);
    count += own;
    tail += own;
  }
  return count;
}

inline MajoranaSupport majorana_decompose(const PauliString& p) {
  const std::size_t n = p.num_qubits();
  // Walking right to left: the letter at a site equals its own Majorana
  // content times Z^(number of Majoranas on later sites).
  std::vector<std::uint32_t> rev;
  unsigned tail = 0;
  for (std::size_t q = n; q-- > 0;) {
    auto v = static_cast<unsigned>(p.letter(q));
    if (tail & 1u) v ^= static_cast<unsigned>(Pauli::Z);
    // Own content: X -> c^X, Y -> c^Y, Z ~ c^X c^Y, I -> nothing.
    const bool has_y = v == static_cast<unsigned>(Pauli::Y) || v == static_cast<unsigned>(Pauli::Z);
    const bool has_x = v == static_cast<unsigned>(Pauli::X) || v == static_cast<unsigned>(Pauli::Z);
    if (has_y) rev.push_back(static_cast<std::uint32_t>(2 * q + 1));
    if (has_x) rev.push_back(static_cast<std::uint32_t>(2 * q));
    tail += static_cast<unsigned>(has_x) + static_cast<unsigned>(has_y);
  }
  MajoranaSupport out;
  out.indices.assign(rev.rbegin(), rev.rend());
  PauliString prod = majorana_product(out.indices, n);
  if (!prod.same_letters(p)) throw std::logic_error("majorana_decompose: letter mismatch");
  out.phase = static_cast<std::uint8_t>((p.phase() + 4 - prod.phase()) & 3);
  return out;
}

}  // namespace mgsim
