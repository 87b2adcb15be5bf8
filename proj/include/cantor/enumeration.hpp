#pragma once
// enumeration.hpp - staged enumerations of c.e. sets (stand-ins for the
// halting set) and of prefix-free string sets (stand-ins for a test member).

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cantor/bitcore.hpp"
#include "cantor/streams.hpp"

namespace cantor {

// ============================================================
//  StagedEnumeration
// ============================================================

/// W = ∪_s W_s with at most one new element per stage and no element
/// enumerated twice.  Queries past the horizon are errors.
class StagedEnumeration {
 public:
  StagedEnumeration() = default;

  static StagedEnumeration from_pairs(const std::vector<std::pair<Natural, Natural>>& pairs,
                                      Natural horizon) {
    StagedEnumeration w;
    w.horizon_ = horizon;
    for (const auto& [s, n] : pairs) {
      if (s > horizon) {
        throw DomainError("stage " + std::to_string(s) + " of element " + std::to_string(n) +
                          " beyond horizon " + std::to_string(horizon));
      }
      if (w.stage_of_.contains(n)) {
        throw DomainError("element " + std::to_string(n) + " repeated (stages " +
                          std::to_string(w.stage_of_.at(n)) + " and " + std::to_string(s) + ")");
      }
      if (w.element_at_.contains(s)) {
        throw DomainError("stage " + std::to_string(s) + " repeated (elements " +
                          std::to_string(w.element_at_.at(s)) + " and " + std::to_string(n) + ")");
      }
      w.element_at_.emplace(s, n);
      w.stage_of_.emplace(n, s);
    }
    return w;
  }

  Natural horizon() const noexcept { return horizon_; }

  /// The element entering W at stage s, if any.
  std::optional<Natural> new_element_at(Natural s) const {
    check(s);
    auto it = element_at_.find(s);
    if (it == element_at_.end()) return std::nullopt;
    return it->second;
  }

  /// n ∈ W_s
  bool member_at_stage(Natural n, Natural s) const {
    check(s);
    auto it = stage_of_.find(n);
    return it != stage_of_.end() && it->second <= s;
  }

  /// Stage at which n enters, if it ever does within the horizon.  This is
  /// full knowledge of the set and only reference inverters may use it.
  std::optional<Natural> entry_stage(Natural n) const {
    auto it = stage_of_.find(n);
    if (it == stage_of_.end()) return std::nullopt;
    return it->second;
  }

  /// W_s
  std::set<Natural> members_at(Natural s) const {
    check(s);
    std::set<Natural> out;
    for (const auto& [stage, n] : element_at_) {
      if (stage > s) break;
      out.insert(n);
    }
    return out;
  }

  /// (stage, element) pairs in stage order.
  std::vector<std::pair<Natural, Natural>> schedule() const {
    return {element_at_.begin(), element_at_.end()};
  }

  std::size_t size() const noexcept { return element_at_.size(); }

  friend bool operator==(const StagedEnumeration&, const StagedEnumeration&) = default;

 private:
  void check(Natural s) const {
    if (s > horizon_) throw HorizonError(s, horizon_);
  }

  std::map<Natural, Natural> element_at_;
  std::map<Natural, Natural> stage_of_;
  Natural horizon_ = 0;
};

/// Number of Collatz steps from n down to 1.
inline Natural collatz_length(Natural n) {
  Natural steps = 0;
  while (n != 1) {
    n = (n % 2 == 0) ? n / 2 : 3 * n + 1;
    ++steps;
  }
  return steps;
}

/// Deterministic toy halting set.  Elements 1..max_element-1 enter in order
/// of (Collatz trajectory length, n) at stage max(length, previous stage + 1);
/// 0 never reaches 1 and never enters, nor does anything whose stage would
/// exceed max_stage.  Nothing ever enters later, so the schedule is final and
/// the horizon is set to cover every oracle-use a reduction can ask about.
inline StagedEnumeration collatz_toy(Natural max_element, Natural max_stage) {
  std::vector<std::pair<Natural, Natural>> by_length;
  for (Natural n = 1; n < max_element; ++n) by_length.emplace_back(collatz_length(n), n);
  std::sort(by_length.begin(), by_length.end());

  std::vector<std::pair<Natural, Natural>> pairs;
  std::optional<Natural> prev;
  for (const auto& [len, n] : by_length) {
    Natural s = prev ? std::max(len, *prev + 1) : len;
    if (s > max_stage) break;
    pairs.emplace_back(s, n);
    prev = s;
  }
  return StagedEnumeration::from_pairs(pairs, 2 * pair(max_element, max_stage) + 2);
}

/// Enumeration file: lines "s n", '#' comments, blank lines ignored.  An
/// optional "horizon H" line fixes the horizon; otherwise it is the last
/// listed stage.
inline StagedEnumeration parse_enumeration(std::istream& in) {
  std::vector<std::pair<Natural, Natural>> pairs;
  std::optional<Natural> horizon;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    auto bad = [&] {
      return ParseError("enumeration line " + std::to_string(lineno) + ": expected 's n', got '" +
                        line + "'");
    };
    if (!(fields >> b) || (fields >> extra)) throw bad();
    auto number = [&](const std::string& t) {
      if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) throw bad();
      return static_cast<Natural>(std::stoull(t));
    };
    if (a == "horizon") {
      horizon = number(b);
    } else {
      pairs.emplace_back(number(a), number(b));
    }
  }
  Natural h = horizon.value_or(0);
  if (!horizon) {
    for (const auto& [s, n] : pairs) h = std::max(h, s);
  }
  return StagedEnumeration::from_pairs(pairs, h);
}

// ============================================================
//  DecidedSet
// ============================================================

/// Absolute membership up to a horizon.  Kept apart from StagedEnumeration:
/// querying "i ∈ W" outright is a stronger capability than querying W_s.
class DecidedSet {
 public:
  DecidedSet(std::set<Natural> members, Natural horizon)
      : members_(std::move(members)), horizon_(horizon) {
    if (!members_.empty() && *members_.rbegin() > horizon_) {
      throw DomainError("decided set member " + std::to_string(*members_.rbegin()) +
                        " beyond horizon " + std::to_string(horizon_));
    }
  }

  /// Treats W_horizon as the final set, decided for every n up to
  /// `horizon` (unbounded by default).
  static DecidedSet from_enumeration(const StagedEnumeration& w,
                                     Natural horizon = std::numeric_limits<Natural>::max()) {
    return DecidedSet(w.members_at(w.horizon()), horizon);
  }

  bool contains(Natural n) const {
    if (n > horizon_) throw HorizonError(n, horizon_);
    return members_.contains(n);
  }

  Natural horizon() const noexcept { return horizon_; }
  const std::set<Natural>& members() const noexcept { return members_; }

  /// Every element w enumerates is a member.
  bool consistent_with(const StagedEnumeration& w) const {
    for (const auto& [s, n] : w.schedule()) {
      if (n > horizon_ || !members_.contains(n)) return false;
    }
    return true;
  }

 private:
  std::set<Natural> members_;
  Natural horizon_;
};

/// Decided-set file: one element per line, optional "horizon H" line.
inline DecidedSet parse_decided_set(std::istream& in) {
  std::set<Natural> members;
  std::optional<Natural> horizon;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    auto bad = [&] {
      return ParseError("decided set line " + std::to_string(lineno) + ": unexpected '" + line +
                        "'");
    };
    auto number = [&](const std::string& t) {
      if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) throw bad();
      return static_cast<Natural>(std::stoull(t));
    };
    if (a == "horizon") {
      if (!(fields >> b) || (fields >> extra)) throw bad();
      horizon = number(b);
    } else {
      if (fields >> extra) throw bad();
      if (!members.insert(number(a)).second) {
        throw ParseError("decided set line " + std::to_string(lineno) + ": element " + a +
                         " repeated");
      }
    }
  }
  Natural h = horizon.value_or(members.empty() ? 0 : *members.rbegin());
  return DecidedSet(std::move(members), h);
}

// ============================================================
//  StagedStringEnumeration
// ============================================================

/// U = ∪_s U_s, one word per stage, prefix-free at every stage.  The empty
/// word is rejected: it would cover the whole space.
class StagedStringEnumeration {
 public:
  StagedStringEnumeration() = default;

  static StagedStringEnumeration from_pairs(const std::vector<std::pair<Natural, BitString>>& pairs,
                                            Natural horizon) {
    StagedStringEnumeration u;
    u.horizon_ = horizon;
    for (const auto& [s, word] : pairs) {
      if (word.empty()) {
        throw DomainError("stage " + std::to_string(s) + ": empty word not permitted");
      }
      if (s > horizon) {
        throw DomainError("stage " + std::to_string(s) + " beyond horizon " +
                          std::to_string(horizon));
      }
      if (!u.word_at_.emplace(s, word).second) {
        throw DomainError("stage " + std::to_string(s) + " repeated");
      }
    }
    // Prefix-freeness of the final set implies it at every stage.
    std::vector<BitString> all;
    for (const auto& [s, word] : u.word_at_) all.push_back(word);
    std::set<BitString> distinct(all.begin(), all.end());
    if (distinct.size() != all.size()) throw PrefixError("word enumerated twice");
    PrefixFreeSet check(all);
    (void)check;
    return u;
  }

  Natural horizon() const noexcept { return horizon_; }

  std::optional<BitString> new_word_at(Natural s) const {
    check(s);
    auto it = word_at_.find(s);
    if (it == word_at_.end()) return std::nullopt;
    return it->second;
  }

  /// U_s
  PrefixFreeSet members_at(Natural s) const {
    check(s);
    std::vector<BitString> out;
    for (const auto& [stage, word] : word_at_) {
      if (stage > s) break;
      out.push_back(word);
    }
    return PrefixFreeSet(std::move(out));
  }

  std::vector<std::pair<Natural, BitString>> schedule() const {
    return {word_at_.begin(), word_at_.end()};
  }

  /// Whether some word of U_s is a prefix of the column whose bits `read`
  /// yields.  Walks the words bit by bit, so only the bits needed to
  /// decide are read.
  template <class Reader>
  bool column_hit(Reader&& read, Natural s) const {
    check(s);
    std::vector<const BitString*> live;
    for (const auto& [stage, word] : word_at_) {
      if (stage > s) break;
      live.push_back(&word);
    }
    for (Natural i = 0; !live.empty(); ++i) {
      const bool bit = read(i);
      std::vector<const BitString*> next;
      for (const BitString* w : live) {
        if ((*w)[i] != bit) continue;
        if (w->size() == i + 1) return true;
        next.push_back(w);
      }
      live = std::move(next);
    }
    return false;
  }

 private:
  void check(Natural s) const {
    if (s > horizon_) throw HorizonError(s, horizon_);
  }

  std::map<Natural, BitString> word_at_;
  Natural horizon_ = 0;
};

/// String-enumeration file: lines "s WORD", optional "horizon H".
inline StagedStringEnumeration parse_string_enumeration(std::istream& in) {
  std::vector<std::pair<Natural, BitString>> pairs;
  std::optional<Natural> horizon;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    auto bad = [&] {
      return ParseError("string enumeration line " + std::to_string(lineno) +
                        ": expected 's WORD', got '" + line + "'");
    };
    if (!(fields >> b) || (fields >> extra)) throw bad();
    if (a.find_first_not_of("0123456789") != std::string::npos) {
      if (a != "horizon") throw bad();
    }
    if (a == "horizon") {
      if (b.find_first_not_of("0123456789") != std::string::npos) throw bad();
      horizon = std::stoull(b);
      continue;
    }
    try {
      pairs.emplace_back(std::stoull(a), BitString(b));
    } catch (const ParseError&) {
      throw bad();
    }
  }
  Natural h = horizon.value_or(0);
  if (!horizon) {
    for (const auto& [s, w] : pairs) h = std::max(h, s);
  }
  return StagedStringEnumeration::from_pairs(pairs, h);
}

/// Whether some word of U_s is a prefix of `col`.
inline bool column_hit(const StagedStringEnumeration& u, const BitSource& col, Natural s) {
  return u.column_hit([&](Natural i) { return col(i); }, s);
}

}  // namespace cantor
