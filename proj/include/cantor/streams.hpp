#pragma once
// streams.hpp - infinite bit sources, oracle tapes with use accounting,
// real functions as per-bit transducers, and their read-barrier
// representations.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantor/bitcore.hpp"

namespace cantor {

// ============================================================
//  BitSource
// ============================================================

/// A total, deterministic infinite bit sequence.  Cheap to copy; the
/// underlying generator is shared and immutable.
class BitSource {
 public:
  using Generator = std::function<bool(Natural)>;

  BitSource(std::string description, Generator gen)
      : description_(std::move(description)),
        gen_(std::make_shared<const Generator>(std::move(gen))) {}

  bool at(Natural pos) const { return (*gen_)(pos); }
  bool operator()(Natural pos) const { return at(pos); }

  BitString prefix(std::size_t n) const {
    BitString w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(at(i));
    return w;
  }

  const std::string& description() const noexcept { return description_; }

 private:
  std::string description_;
  std::shared_ptr<const Generator> gen_;
};

namespace sources {

/// `prefix` followed by zeros forever.
inline BitSource finite(const BitString& prefix) {
  return BitSource("finite:" + prefix.to_string(), [prefix](Natural p) {
    return p < prefix.size() && prefix[p];
  });
}

inline BitSource zeros() {
  return BitSource("zeros", [](Natural) { return false; });
}

inline BitSource ones() {
  return BitSource("ones", [](Natural) { return true; });
}

inline BitSource periodic(const BitString& word) {
  if (word.empty()) throw DomainError("periodic source needs a non-empty word");
  return BitSource("periodic:" + word.to_string(),
                   [word](Natural p) { return word[p % word.size()]; });
}

inline BitSource flipped(const BitSource& base, Natural position) {
  return BitSource("flip:" + std::to_string(position) + ":" + base.description(),
                   [base, position](Natural p) { return p == position ? !base(p) : base(p); });
}

/// even ⊕ odd
inline BitSource interleaved(const BitSource& even, const BitSource& odd) {
  return BitSource("interleave(" + even.description() + "," + odd.description() + ")",
                   [even, odd](Natural p) { return p % 2 == 0 ? even(p / 2) : odd(p / 2); });
}

/// `word`, then the tail source continuing from position |word|.
inline BitSource prefixed(const BitString& word, const BitSource& tail) {
  return BitSource("prefix:" + word.to_string() + ":" + tail.description(),
                   [word, tail](Natural p) { return p < word.size() ? word[p] : tail(p); });
}

/// Column n of w: bit i is w(<n,i>).
inline BitSource column(const BitSource& w, Natural n) {
  return BitSource("column:" + std::to_string(n) + ":" + w.description(),
                   [w, n](Natural i) { return w(pair(n, i)); });
}

/// A real assembled from columns: column c comes from assigned[c] when
/// present, otherwise from column c of `fallback`.
inline BitSource columns(std::map<Natural, BitSource> assigned, const BitSource& fallback,
                         std::string description = "columns") {
  return BitSource(std::move(description), [assigned = std::move(assigned), fallback](Natural p) {
    auto [c, i] = unpair(p);
    auto it = assigned.find(c);
    return it == assigned.end() ? fallback(p) : it->second(i);
  });
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Reproducible pseudo-random bits, random access by position.
inline BitSource random(std::uint64_t seed) {
  return BitSource("random:" + std::to_string(seed), [seed](Natural p) {
    return (splitmix64(splitmix64(seed) ^ (p / 64)) >> (p % 64)) & 1u;
  });
}

}  // namespace sources

// ============================================================
//  OracleTape
// ============================================================

/// Thrown by a tape when a read reaches its barrier.
struct BarrierHit {
  Natural position;
};

/// Thrown by an assignment-backed tape on a read of an unpinned position.
struct UnassignedRead {
  Natural position;
};

/// Thrown by evaluators (or by the step budget) when an output bit is
/// undefined.  evaluate() turns it into a DivergenceError.
struct Diverges {
  std::string why;
};

inline constexpr Natural kNoBarrier = std::numeric_limits<Natural>::max();
inline constexpr std::uint64_t kDefaultStepBudget = 1'000'000;

struct TapeLimits {
  Natural barrier = kNoBarrier;
  std::uint64_t step_budget = kDefaultStepBudget;  // per output bit
};

/// Read-tracking view of an input real.  use() is one past the largest
/// position read so far; it never decreases.
class OracleTape {
 public:
  explicit OracleTape(BitSource source, TapeLimits limits = {})
      : source_(std::move(source)), limits_(limits) {}

  /// Backed by a partial assignment: unpinned reads throw UnassignedRead.
  OracleTape(const PartialAssignment& assignment, TapeLimits limits)
      : source_(sources::zeros()), assignment_(&assignment), limits_(limits) {}

  bool read(Natural pos) {
    if (pos >= limits_.barrier) throw BarrierHit{pos};
    bool bit;
    if (assignment_) {
      auto b = assignment_->get(pos);
      if (!b) throw UnassignedRead{pos};
      bit = *b;
    } else {
      bit = source_(pos);
    }
    use_ = std::max(use_, pos + 1);
    return bit;
  }

  /// Charges elementary steps against the per-bit budget.
  void step(std::uint64_t n = 1) {
    steps_ += n;
    if (steps_ > limits_.step_budget) throw Diverges{"step budget exhausted"};
  }

  void reset_steps() noexcept { steps_ = 0; }

  Natural use() const noexcept { return use_; }
  const TapeLimits& limits() const noexcept { return limits_; }

  /// The underlying source, bypassing use accounting.  Well-behaved
  /// evaluators never touch it.
  const BitSource& source() const noexcept { return source_; }

 private:
  BitSource source_;
  const PartialAssignment* assignment_ = nullptr;
  TapeLimits limits_;
  Natural use_ = 0;
  std::uint64_t steps_ = 0;
};

// ============================================================
//  RealFunction
// ============================================================

/// A (possibly partial) map on Cantor space, given bit by bit: bit(tape, j)
/// computes output bit j, reading the input only through the tape.
class RealFunction {
 public:
  using BitEvaluator = std::function<bool(OracleTape&, Natural)>;

  RealFunction(std::string descriptor, BitEvaluator eval)
      : descriptor_(std::move(descriptor)),
        eval_(std::make_shared<const BitEvaluator>(std::move(eval))) {}

  bool bit(OracleTape& tape, Natural j) const { return (*eval_)(tape, j); }
  const std::string& descriptor() const noexcept { return descriptor_; }

 private:
  std::string descriptor_;
  std::shared_ptr<const BitEvaluator> eval_;
};

struct Evaluation {
  BitString bits;
  Natural use = 0;
};

struct EvalOptions {
  std::uint64_t step_budget = kDefaultStepBudget;
};

/// First n output bits of f on x, with the exact oracle-use.
inline Evaluation evaluate(const RealFunction& f, const BitSource& x, std::size_t n,
                           EvalOptions opt = {}) {
  OracleTape tape(x, TapeLimits{kNoBarrier, opt.step_budget});
  Evaluation out;
  for (Natural j = 0; j < n; ++j) {
    tape.reset_steps();
    try {
      out.bits.push_back(f.bit(tape, j));
    } catch (const Diverges& d) {
      throw DivergenceError(j, d.why);
    }
  }
  out.use = tape.use();
  return out;
}

/// Single output bit with its own use.
inline std::pair<bool, Natural> evaluate_bit(const RealFunction& f, const BitSource& x,
                                             Natural j, EvalOptions opt = {}) {
  OracleTape tape(x, TapeLimits{kNoBarrier, opt.step_budget});
  try {
    bool b = f.bit(tape, j);
    return {b, tape.use()};
  } catch (const Diverges& d) {
    throw DivergenceError(j, d.why);
  }
}

namespace functions {

inline RealFunction identity() {
  return RealFunction("identity", [](OracleTape& t, Natural j) { return t.read(j); });
}

/// Ignores its input.
inline RealFunction constant(const BitSource& value) {
  return RealFunction("constant:" + value.description(),
                      [value](OracleTape&, Natural j) { return value(j); });
}

/// x ↦ 0x, an injection.
inline RealFunction shift_right() {
  return RealFunction("shift-right",
                      [](OracleTape& t, Natural j) { return j == 0 ? false : t.read(j - 1); });
}

/// x ↦ x ⊕ 0^ω, an injection.
inline RealFunction interleave_with_zeros() {
  return RealFunction("interleave-zeros", [](OracleTape& t, Natural j) {
    return j % 2 == 0 ? t.read(j / 2) : false;
  });
}

/// Output join f(x) ⊕ g(x).
inline RealFunction interleave_outputs(const RealFunction& f, const RealFunction& g) {
  return RealFunction("join(" + f.descriptor() + "," + g.descriptor() + ")",
                      [f, g](OracleTape& t, Natural j) {
                        return j % 2 == 0 ? f.bit(t, j / 2) : g.bit(t, j / 2);
                      });
}

}  // namespace functions

// ============================================================
//  Representation
// ============================================================

/// The read-barrier representation of f: map(σ) is the longest output word
/// computable while reading only σ.  Monotone by construction.
class Representation {
 public:
  Representation(RealFunction f, std::size_t depth, std::size_t output_cap = 1024,
                 std::uint64_t step_budget = kDefaultStepBudget)
      : f_(std::move(f)), depth_(depth), output_cap_(output_cap), step_budget_(step_budget) {}

  BitString operator()(const BitString& sigma) const { return map(sigma, output_cap_); }

  /// map(σ) truncated to at most `cap` bits.
  BitString map(const BitString& sigma, std::size_t cap) const {
    if (sigma.size() > depth_) {
      throw DomainError("representation materialized to depth " + std::to_string(depth_) +
                        ", asked for a word of length " + std::to_string(sigma.size()));
    }
    OracleTape tape(sources::finite(sigma), TapeLimits{sigma.size(), step_budget_});
    BitString out;
    for (Natural j = 0; j < std::min(cap, output_cap_); ++j) {
      tape.reset_steps();
      try {
        out.push_back(f_.bit(tape, j));
      } catch (const BarrierHit&) {
        break;
      } catch (const Diverges&) {
        break;
      }
    }
    return out;
  }

  /// map(σ) ⪯ y, reading y only as far as needed.
  bool image_prefix_of(const BitString& sigma, const BitSource& y, std::size_t cap) const {
    BitString img = map(sigma, cap);
    for (std::size_t j = 0; j < img.size(); ++j) {
      if (img[j] != y(j)) return false;
    }
    return true;
  }

  const RealFunction& function() const noexcept { return f_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t output_cap() const noexcept { return output_cap_; }

 private:
  RealFunction f_;
  std::size_t depth_;
  std::size_t output_cap_;
  std::uint64_t step_budget_;
};

inline Representation representation_of(const RealFunction& f, std::size_t depth,
                                        std::size_t output_cap = 1024) {
  return Representation(f, depth, output_cap);
}

/// T_y = {σ : |σ| ≤ depth, rep(σ) ⪯ y}, in canonical order.  Prefix-closed.
inline std::vector<BitString> preimage_tree(const Representation& rep, const BitSource& y,
                                            std::size_t depth) {
  std::vector<BitString> out;
  std::vector<BitString> level{BitString{}};
  for (std::size_t m = 0; m <= depth && !level.empty(); ++m) {
    std::vector<BitString> next;
    for (const auto& sigma : level) {
      if (!rep.image_prefix_of(sigma, y, rep.output_cap())) continue;
      out.push_back(sigma);
      if (m < depth) {
        BitString a = sigma, b = sigma;
        a.push_back(false);
        b.push_back(true);
        next.push_back(std::move(a));
        next.push_back(std::move(b));
      }
    }
    level = std::move(next);
  }
  return out;
}

// ============================================================
//  Use soundness
// ============================================================

struct UseVerdict {
  bool sound = true;
  Natural use = 0;
  std::optional<std::size_t> failing_trial;
  std::optional<Natural> differing_bit;

  std::string describe() const {
    if (sound) return "pass use=" + std::to_string(use);
    return "fail use=" + std::to_string(use) + " trial=" + std::to_string(*failing_trial) +
           " bit=" + std::to_string(*differing_bit);
  }
};

/// Re-evaluates f on `trials` inputs that agree with x below the reported
/// use and are random beyond it; any change in the output is a violation.
inline UseVerdict use_soundness_check(const RealFunction& f, const BitSource& x, std::size_t n,
                                      std::size_t trials, std::uint64_t seed = 0) {
  const Evaluation base = evaluate(f, x, n);
  UseVerdict verdict;
  verdict.use = base.use;
  for (std::size_t t = 0; t < trials; ++t) {
    // trial 0 complements the tail so any single peek beyond the use shows up
    const BitSource noise = t == 0 ? BitSource("complement", [x](Natural p) { return !x(p); })
                                   : sources::random(sources::splitmix64(seed * 1000003 + t));
    const Natural u = base.use;
    BitSource mutated("mutated", [x, noise, u](Natural p) { return p < u ? x(p) : noise(p); });
    const Evaluation again = evaluate(f, mutated, n);
    for (std::size_t j = 0; j < n; ++j) {
      if (again.bits[j] != base.bits[j]) {
        verdict.sound = false;
        verdict.failing_trial = t;
        verdict.differing_bit = j;
        return verdict;
      }
    }
  }
  return verdict;
}

}  // namespace cantor
