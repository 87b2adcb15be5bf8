#pragma once
// bitcore.hpp - finite combinatorics of Cantor space: words, pairing,
// interleaving, prefix-free sets, partial assignments and exact measure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cantor/error.hpp"

namespace cantor {

using Natural = std::uint64_t;

// ============================================================
//  BitString
// ============================================================

/// A finite word over {0,1}.  Ordered canonically: by length, then
/// lexicographically.
class BitString {
 public:
  BitString() = default;

  /// Parses a word of '0' and '1' characters.
  explicit BitString(std::string_view text) {
    bits_.reserve(text.size());
    for (char c : text) {
      if (c != '0' && c != '1') {
        throw ParseError("not a binary word: '" + std::string(text) + "'");
      }
      bits_.push_back(static_cast<std::uint8_t>(c - '0'));
    }
  }

  static BitString zeros(std::size_t n) {
    BitString w;
    w.bits_.assign(n, 0);
    return w;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }

  void push_back(bool b) { bits_.push_back(b ? 1 : 0); }
  void append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  BitString prefix(std::size_t n) const {
    BitString w;
    w.bits_.assign(bits_.begin(),
                   bits_.begin() + static_cast<std::ptrdiff_t>(std::min(n, size())));
    return w;
  }

  BitString with_bit(std::size_t i, bool b) const {
    BitString w = *this;
    w.bits_.at(i) = b ? 1 : 0;
    return w;
  }

  /// this ⪯ other
  bool is_prefix_of(const BitString& other) const {
    return size() <= other.size() &&
           std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
  }

  /// One of the two words is a prefix of the other.
  bool compatible_with(const BitString& other) const {
    return is_prefix_of(other) || other.is_prefix_of(*this);
  }

  std::string to_string() const {
    std::string s;
    s.reserve(size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.bits_ <=> b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

inline BitString operator+(BitString a, const BitString& b) {
  a.append(b);
  return a;
}

/// Every word of length n, in lexicographic order.  Only for small n.
inline std::vector<BitString> all_words(std::size_t n) {
  if (n > 24) throw DomainError("refusing to enumerate 2^" + std::to_string(n) + " words");
  std::vector<BitString> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    BitString w;
    for (std::size_t i = 0; i < n; ++i) w.push_back((v >> (n - 1 - i)) & 1u);
    out.push_back(std::move(w));
  }
  return out;
}

// ============================================================
//  Pairing and interleaving
// ============================================================

/// Cantor pairing <n,s> = (n+s)(n+s+1)/2 + s.  Satisfies <n,s> >= s.
constexpr Natural pair(Natural n, Natural s) noexcept {
  const Natural diag = n + s;
  // halve the even factor first so results below 2^64 do not wrap
  const Natural tri = diag % 2 == 0 ? (diag / 2) * (diag + 1) : diag * ((diag + 1) / 2);
  return tri + s;
}

constexpr Natural isqrt(Natural m) noexcept {
  if (m < 2) return m;
  Natural lo = 1, hi = std::min<Natural>(m, Natural{1} << 32);
  while (lo < hi) {
    Natural mid = lo + (hi - lo + 1) / 2;
    if (mid <= m / mid) lo = mid; else hi = mid - 1;
  }
  return lo;
}

/// Inverse of pair().  Exact for every m: the float estimate of the
/// diagonal is corrected in 128-bit arithmetic.
inline std::pair<Natural, Natural> unpair(Natural m) noexcept {
  using Wide = unsigned __int128;
  auto tri = [](Wide d) { return d * (d + 1) / 2; };
  Wide diag = static_cast<Wide>((std::sqrt(8.0L * static_cast<long double>(m) + 1.0L) - 1.0L) / 2.0L);
  while (diag > 0 && tri(diag) > m) --diag;
  while (tri(diag + 1) <= m) ++diag;
  const Natural s = m - static_cast<Natural>(tri(diag));
  return {static_cast<Natural>(diag) - s, s};
}

/// Join of two words: even positions from a, odd from b.
inline BitString interleave(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) {
    throw DomainError("interleave: length mismatch " + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()));
  }
  BitString out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(a[i]);
    out.push_back(b[i]);
  }
  return out;
}

inline std::pair<BitString, BitString> deinterleave(const BitString& c) {
  if (c.size() % 2 != 0) {
    throw DomainError("deinterleave: odd length " + std::to_string(c.size()));
  }
  BitString even, odd;
  for (std::size_t i = 0; i < c.size(); i += 2) {
    even.push_back(c[i]);
    odd.push_back(c[i + 1]);
  }
  return {even, odd};
}

// ============================================================
//  Exact measure
// ============================================================

using Rational = boost::multiprecision::cpp_rational;

/// 2^(-k)
inline Rational dyadic(std::size_t k) {
  boost::multiprecision::cpp_int den = 1;
  den <<= static_cast<unsigned>(k);
  return Rational(1, den);
}

/// "numerator/denominator", always with an explicit denominator.
inline std::string to_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" +
         boost::multiprecision::denominator(q).str();
}

// ============================================================
//  Partial assignments
// ============================================================

/// Finitely many pinned positions.  Its class {x : x(i) = a(i)} has
/// measure exactly 2^(-|domain|).
class PartialAssignment {
 public:
  PartialAssignment() = default;

  static PartialAssignment from_word(const BitString& w) {
    PartialAssignment a;
    for (std::size_t i = 0; i < w.size(); ++i) a.assign(i, w[i]);
    return a;
  }

  void assign(Natural pos, bool bit) {
    if (!constraints_.emplace(pos, bit).second) {
      throw DomainError("position " + std::to_string(pos) + " assigned twice");
    }
  }

  std::optional<bool> get(Natural pos) const {
    auto it = constraints_.find(pos);
    if (it == constraints_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return constraints_.size(); }
  bool empty() const noexcept { return constraints_.empty(); }
  const std::map<Natural, bool>& constraints() const noexcept { return constraints_; }

  /// One past the largest pinned position (0 when empty).
  Natural span_length() const noexcept {
    return constraints_.empty() ? 0 : constraints_.rbegin()->first + 1;
  }

  /// The classes of the two assignments are disjoint.
  bool conflicts_with(const PartialAssignment& other) const {
    const auto& small = size() <= other.size() ? *this : other;
    const auto& large = size() <= other.size() ? other : *this;
    for (const auto& [pos, bit] : small.constraints_) {
      auto b = large.get(pos);
      if (b && *b != bit) return true;
    }
    return false;
  }

  bool conflicts_with(const BitString& sigma) const {
    for (const auto& [pos, bit] : constraints_) {
      if (pos >= sigma.size()) break;
      if (sigma[pos] != bit) return true;
    }
    return false;
  }

  /// Restriction to positions below n, as a new assignment.
  PartialAssignment restricted_below(Natural n) const {
    PartialAssignment a;
    for (const auto& [pos, bit] : constraints_) {
      if (pos >= n) break;
      a.constraints_.emplace(pos, bit);
    }
    return a;
  }

  /// Every word of length n in the class; unpinned positions range freely.
  std::vector<BitString> expand(std::size_t n) const {
    std::vector<Natural> free;
    for (Natural i = 0; i < n; ++i) {
      if (!constraints_.contains(i)) free.push_back(i);
    }
    if (free.size() > 24) throw DomainError("class too large to expand");
    std::vector<BitString> out;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << free.size()); ++v) {
      BitString w;
      std::size_t f = 0;
      for (Natural i = 0; i < n; ++i) {
        if (auto b = get(i)) {
          w.push_back(*b);
        } else {
          w.push_back((v >> (free.size() - 1 - f)) & 1u);
          ++f;
        }
      }
      out.push_back(std::move(w));
    }
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [pos, bit] : constraints_) {
      if (!first) s += ",";
      first = false;
      s += std::to_string(pos) + "->" + (bit ? "1" : "0");
    }
    return s + "}";
  }

  friend bool operator==(const PartialAssignment&, const PartialAssignment&) = default;

 private:
  std::map<Natural, bool> constraints_;
};

inline Rational assignment_measure(const PartialAssignment& a) { return dyadic(a.size()); }

// ============================================================
//  Prefix-free sets
// ============================================================

/// A finite set of pairwise prefix-incomparable words, held in canonical
/// (length, lexicographic) order.
class PrefixFreeSet {
 public:
  PrefixFreeSet() = default;

  explicit PrefixFreeSet(std::vector<BitString> words) : members_(std::move(words)) {
    std::sort(members_.begin(), members_.end(), [](const BitString& a, const BitString& b) {
      return a.to_string() < b.to_string();
    });
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    // In plain lexicographic order a prefix relation always shows up between
    // neighbours.
    for (std::size_t i = 1; i < members_.size(); ++i) {
      if (members_[i - 1].is_prefix_of(members_[i])) {
        throw PrefixError("not prefix-free: '" + members_[i - 1].to_string() +
                          "' is a prefix of '" + members_[i].to_string() + "'");
      }
    }
    std::sort(members_.begin(), members_.end());
  }

  const std::vector<BitString>& members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  std::size_t max_length() const noexcept {
    std::size_t m = 0;
    for (const auto& w : members_) m = std::max(m, w.size());
    return m;
  }

 private:
  std::vector<BitString> members_;
};

inline Rational measure(const PrefixFreeSet& v) {
  Rational total = 0;
  for (const auto& w : v.members()) total += dyadic(w.size());
  return total;
}

/// μ(⟦v⟧ ∩ ⟦σ⟧)
inline Rational intersect_measure(const PrefixFreeSet& v, const BitString& sigma) {
  Rational total = 0;
  for (const auto& w : v.members()) {
    if (sigma.is_prefix_of(w)) {
      total += dyadic(w.size());
    } else if (w.is_prefix_of(sigma)) {
      total += dyadic(sigma.size());
    }
  }
  return total;
}

inline void require_disjoint(std::span<const PartialAssignment> classes) {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      if (!classes[i].conflicts_with(classes[j])) {
        throw PrefixError("classes " + classes[i].to_string() + " and " +
                          classes[j].to_string() + " overlap");
      }
    }
  }
}

/// Measure of a union of pairwise disjoint assignment classes.
inline Rational measure(std::span<const PartialAssignment> classes) {
  require_disjoint(classes);
  Rational total = 0;
  for (const auto& a : classes) total += assignment_measure(a);
  return total;
}

/// μ(class ∩ ⟦σ⟧) summed over pairwise disjoint classes.
inline Rational intersect_measure(std::span<const PartialAssignment> classes,
                                  const BitString& sigma) {
  require_disjoint(classes);
  Rational total = 0;
  for (const auto& a : classes) {
    if (a.conflicts_with(sigma)) continue;
    std::size_t pinned = sigma.size();
    for (const auto& [pos, bit] : a.constraints()) {
      if (pos >= sigma.size()) ++pinned;
    }
    total += dyadic(pinned);
  }
  return total;
}

/// One word per line; '#' starts a comment; blank lines are skipped.
inline PrefixFreeSet parse_prefix_set(std::istream& in) {
  std::vector<BitString> words;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string_view token(line.data() + first, last - first + 1);
    try {
      words.emplace_back(token);
    } catch (const ParseError&) {
      throw ParseError("prefix set line " + std::to_string(lineno) + ": not a binary word '" +
                       std::string(token) + "'");
    }
  }
  return PrefixFreeSet(std::move(words));
}

}  // namespace cantor
