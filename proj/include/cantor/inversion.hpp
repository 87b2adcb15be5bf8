#pragma once
// inversion.hpp - inverters and the adversaries that turn an inverter into
// a decision procedure for the enumerated set.

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cantor/bitcore.hpp"
#include "cantor/constructions.hpp"
#include "cantor/enumeration.hpp"
#include "cantor/streams.hpp"

namespace cantor {

// ============================================================
//  Verdicts and inverters
// ============================================================

struct Certificate {
  Natural use = 0;          // oracle-use of the decisive inverter computation
  Natural stage_bound = 0;  // the stage at which membership was looked up
  std::vector<std::string> witnesses;
};

struct ExtractionVerdict {
  Natural element = 0;
  bool member = false;
  Certificate certificate;

  /// n=K member=true/false use=U stagebound=S
  std::string line() const {
    return "n=" + std::to_string(element) + " member=" + (member ? "true" : "false") +
           " use=" + std::to_string(certificate.use) +
           " stagebound=" + std::to_string(certificate.stage_bound);
  }
};

/// A candidate inverse.  Binary inverters read y ⊕ r.
struct InverterUnderTest {
  RealFunction g;
  bool declared_total = true;
  bool binary = false;
};

/// Knows w outright: g(y;n) = y(<n,s>) when n enters at s, else 0.
inline InverterUnderTest reference_inverter_simple(const StagedEnumeration& w) {
  return {RealFunction("ref-simple",
                       [w](OracleTape& t, Natural n) {
                         auto s = w.entry_stage(n);
                         return s ? t.read(pair(n, *s)) : false;
                       }),
          true, false};
}

/// Inverse of the surjection on y ⊕ r, ignoring r.
inline InverterUnderTest reference_inverter_surjection(const StagedEnumeration& w) {
  return {RealFunction("ref-surj",
                       [w](OracleTape& t, Natural m) {
                         if (m % 2 == 0) {
                           auto s = w.entry_stage(m / 2);
                           return s ? t.read(2 * pair(m / 2, *s)) : false;
                         }
                         const Natural q = (m - 1) / 2;
                         auto [n, s] = unpair(q);
                         if (w.new_element_at(s) == n) return false;
                         return t.read(2 * q);
                       }),
          true, true};
}

namespace detail {

/// x(m) for an inverse of x⊕z ↦ h^z(x)⊕z: run the marker until m is
/// selected at some stage t and copy y(t); 0 if m is not selected by
/// stage `last`.
template <class Advance>
bool search_selected(OracleTape& tape, Natural m, Natural last, Advance&& advance) {
  for (Natural s = 0; s <= last; ++s) {
    tape.step();
    if (advance(s).p == m) return tape.read(2 * s);
  }
  return false;
}

}  // namespace detail

/// Inverter fixture for two_to_one_v1.  When m ∈ W it is selected by stage
/// max(m, entry stage), so the search is exact; otherwise the search looks
/// `lookahead` stages past m and answers 0 if m is still unused.
inline InverterUnderTest reference_inverter_two_to_one_v1(const StagedEnumeration& w,
                                                          Natural lookahead = 64) {
  return {RealFunction("ref-two1",
                       [w, lookahead](OracleTape& tape, Natural j) {
                         if (j % 2 == 1) return tape.read(j);
                         const Natural m = j / 2;
                         auto entry = w.entry_stage(m);
                         Natural last = entry ? std::max(m, *entry) : m + lookahead;
                         last = std::min(last, w.horizon());
                         MarkerMachine mm(w, MarkerKey::marker);
                         return detail::search_selected(tape, m, last, [&](Natural) {
                           return mm.advance([&](Natural k, Natural st) {
                             return tape.read(2 * pair(k, st) + 1);
                           });
                         });
                       }),
          true, false};
}

/// Inverter fixture for two_to_one_v2: searches `lookahead` stages past m.
inline InverterUnderTest reference_inverter_two_to_one_v2(const StagedEnumeration& w,
                                                          const StagedStringEnumeration& u,
                                                          Natural lookahead = 64) {
  return {RealFunction("ref-two2",
                       [w, u, lookahead](OracleTape& tape, Natural j) {
                         if (j % 2 == 1) return tape.read(j);
                         const Natural m = j / 2;
                         const Natural last =
                             std::min({m + lookahead, w.horizon(), u.horizon()});
                         MarkerMachine mm(w, MarkerKey::counter);
                         return detail::search_selected(tape, m, last, [&](Natural) {
                           return mm.advance([&](Natural d, Natural st) {
                             return u.column_hit(
                                 [&](Natural i) { return tape.read(2 * pair(d, i) + 1); }, st);
                           });
                         });
                       }),
          true, false};
}

// ============================================================
//  Finite-stage inversion check
// ============================================================

enum class StageOutcome { consistent, refuted, diverged };

struct FiniteStageVerdict {
  StageOutcome outcome = StageOutcome::consistent;
  std::optional<Natural> index;  // first refuted or undefined output bit
};

/// The lazily computed real g(y) (or g(y ⊕ r)), memoized per position.
inline BitSource inverter_output(const InverterUnderTest& g, const BitSource& input,
                                 std::uint64_t step_budget) {
  auto cache = std::make_shared<std::map<Natural, bool>>();
  return BitSource("g(" + input.description() + ")",
                   [g, input, step_budget, cache](Natural p) {
                     if (auto it = cache->find(p); it != cache->end()) return it->second;
                     bool b = evaluate_bit(g.g, input, p, EvalOptions{step_budget}).first;
                     cache->emplace(p, b);
                     return b;
                   });
}

/// Does f(g(y)) agree with y on its first n bits?
inline FiniteStageVerdict inverts_at_finite_stage(const RealFunction& f,
                                                  const InverterUnderTest& g, const BitSource& y,
                                                  std::size_t n,
                                                  std::uint64_t step_budget = kDefaultStepBudget,
                                                  const BitSource& r = sources::zeros()) {
  const BitSource input = g.binary ? sources::interleaved(y, r) : y;
  const BitSource x = inverter_output(g, input, step_budget);
  for (Natural j = 0; j < n; ++j) {
    try {
      if (evaluate_bit(f, x, j).first != y(j)) return {StageOutcome::refuted, j};
    } catch (const DivergenceError&) {
      return {StageOutcome::diverged, j};
    }
  }
  return {StageOutcome::consistent, std::nullopt};
}

struct ExtractOptions {
  std::size_t validate_bits = 64;
  std::uint64_t step_budget = kDefaultStepBudget;
  std::size_t use_trials = 4;  // mutations beyond the use before trusting g
  std::uint64_t seed = 0;
};

namespace detail {

inline void require_inverts(const RealFunction& f, const InverterUnderTest& g, const BitSource& y,
                            const ExtractOptions& opt, const std::string& where) {
  auto v = inverts_at_finite_stage(f, g, y, opt.validate_bits, opt.step_budget);
  if (v.outcome == StageOutcome::refuted) {
    throw DomainError("inverter refuted on " + where + " at output bit " +
                      std::to_string(*v.index));
  }
  if (v.outcome == StageOutcome::diverged) {
    throw DivergenceError(*v.index, "inverter undefined on " + where);
  }
}

inline void require_use_sound(const InverterUnderTest& g, const BitSource& input, Natural bit,
                              const ExtractOptions& opt) {
  if (opt.use_trials == 0) return;
  UseVerdict v = use_soundness_check(g.g, input, bit + 1, opt.use_trials, opt.seed);
  if (!v.sound) throw DomainError("inverter " + g.g.descriptor() + " not use-sound: " + v.describe());
}

}  // namespace detail

// ============================================================
//  Extraction: simple one-way map
// ============================================================

/// Decides n ∈ W from g(0^ω;n): a 1 means n ∉ W, a 0 means n ∈ W iff
/// n ∈ W_u with u the oracle-use of that computation.
inline ExtractionVerdict extract_simple(const InverterUnderTest& g, const StagedEnumeration& w,
                                        Natural n, const ExtractOptions& opt = {}) {
  const BitSource y = sources::zeros();
  detail::require_inverts(simple_one_way(w), g, y, opt, "0^w");
  detail::require_use_sound(g, y, n, opt);
  auto [bit, use] = evaluate_bit(g.g, y, n, EvalOptions{opt.step_budget});
  ExtractionVerdict v;
  v.element = n;
  v.certificate.use = use;
  v.certificate.stage_bound = use;
  v.certificate.witnesses.push_back("g(0^w;" + std::to_string(n) + ")=" + (bit ? "1" : "0"));
  v.member = bit ? false : w.member_at_stage(n, use);
  return v;
}

// ============================================================
//  Extraction: randomized inverter of the surjection
// ============================================================

/// One collected member of W: the positions g read (plus σ), and the
/// padded use.  It stands for every word (y⊕r)↾use in the class.
struct HaltingClass {
  PartialAssignment read;
  Natural use = 0;
};

struct RandomizedExtraction {
  ExtractionVerdict verdict;
  std::vector<HaltingClass> collected;  // W_t in collection order
  Rational covered;                     // μ(⟦W_t⟧ ∩ ⟦σ⟧)
  Natural longest = 0;                  // k
  std::size_t explored = 0;

  std::vector<PartialAssignment> classes() const {
    std::vector<PartialAssignment> out;
    for (const auto& c : collected) out.push_back(c.read);
    return out;
  }

  /// W_t as literal words.  Only for small uses.
  PrefixFreeSet words() const {
    std::vector<BitString> out;
    for (const auto& c : collected) {
      auto ws = c.read.expand(c.use);
      out.insert(out.end(), ws.begin(), ws.end());
    }
    return PrefixFreeSet(std::move(out));
  }
};

struct RandomizedOptions {
  std::size_t max_nodes = 1 << 16;
  std::uint64_t step_budget = kDefaultStepBudget;
};

/// Dovetails g(·,·;2n) over ⟦σ⟧, collecting halting classes until they
/// cover more than half of ⟦σ⟧, then answers n ∈ W_k with k the longest
/// collected use.
inline RandomizedExtraction extract_randomized(const InverterUnderTest& g,
                                               const BitString& sigma,
                                               const StagedEnumeration& w, Natural n,
                                               const RandomizedOptions& opt = {}) {
  struct NodeOrder {
    static std::pair<Natural, std::string> key(const PartialAssignment& a) {
      std::string bits;
      for (Natural i = 0; i < a.span_length(); ++i) {
        auto b = a.get(i);
        bits.push_back(b ? (*b ? '1' : '0') : '_');
      }
      return {a.span_length(), bits};
    }
    bool operator()(const PartialAssignment& a, const PartialAssignment& b) const {
      return key(a) < key(b);
    }
  };

  RandomizedExtraction out;
  const Rational half = dyadic(sigma.size() + 1);
  std::set<PartialAssignment, NodeOrder> frontier;
  frontier.insert(PartialAssignment::from_word(sigma));

  while (!frontier.empty()) {
    if (out.explored >= opt.max_nodes) break;
    PartialAssignment node = *frontier.begin();
    frontier.erase(frontier.begin());
    ++out.explored;

    OracleTape tape(node, TapeLimits{kNoBarrier, opt.step_budget});
    try {
      (void)g.g.bit(tape, 2 * n);
    } catch (const UnassignedRead& r) {
      PartialAssignment zero = node, one = node;
      zero.assign(r.position, false);
      one.assign(r.position, true);
      frontier.insert(std::move(zero));
      frontier.insert(std::move(one));
      continue;
    } catch (const Diverges&) {
      continue;
    }
    const Natural use = std::max<Natural>(tape.use(), sigma.size());
    out.covered += assignment_measure(node);
    out.longest = std::max(out.longest, use);
    out.collected.push_back({std::move(node), use});
    if (out.covered > half) {
      out.verdict.element = n;
      out.verdict.member = w.member_at_stage(n, out.longest);
      out.verdict.certificate.use = out.longest;
      out.verdict.certificate.stage_bound = out.longest;
      out.verdict.certificate.witnesses.push_back(
          "t=" + std::to_string(out.collected.size()) + " measure=" + to_string(out.covered));
      return out;
    }
  }
  throw DomainError("measure threshold unreachable on [" + sigma.to_string() + "] after " +
                    std::to_string(out.explored) + " nodes: inverter not total enough");
}

// ============================================================
//  Extraction: two-to-one map
// ============================================================

/// Builds z so the marker sticks on n unless n ∈ W, reads the use u of
/// g(υ0^ω ⊕ z; 2n) and the stage s where the marker reaches n, and answers
/// n ∈ W_max(u,s).  A nonempty ζ needs n > |ζ|; with ζ empty every n works.
inline ExtractionVerdict extract_two_to_one(const InverterUnderTest& g, const StagedEnumeration& w,
                                            Natural n, const BitString& upsilon = {},
                                            const BitString& zeta = {},
                                            const ExtractOptions& opt = {}) {
  if (!zeta.empty() && n <= zeta.size()) {
    throw DomainError("extract two1: need n > |zeta| (n=" + std::to_string(n) +
                      ", |zeta|=" + std::to_string(zeta.size()) + ")");
  }
  const BitSource z = z_builder_v1(n, zeta);
  const BitSource input = sources::interleaved(sources::finite(upsilon), z);
  detail::require_inverts(two_to_one_v1(w), g, input, opt, "the constructed input");
  detail::require_use_sound(g, input, 2 * n, opt);

  const MarkerTrace trace = marker_run_v1(w, z, n + 1);
  std::optional<Natural> reach;
  for (Natural s = 0; s <= n; ++s) {
    if (trace.k_at(s) == n) {
      reach = s;
      break;
    }
  }
  if (!reach) throw DomainError("marker never reaches " + std::to_string(n));

  auto [bit, use] = evaluate_bit(g.g, input, 2 * n, EvalOptions{opt.step_budget});
  ExtractionVerdict v;
  v.element = n;
  v.certificate.use = use;
  v.certificate.stage_bound = std::max(use, *reach);
  v.certificate.witnesses.push_back("marker reaches n at stage " + std::to_string(*reach));
  v.certificate.witnesses.push_back("g(y0+z;2n)=" + std::string(bit ? "1" : "0"));
  v.member = w.member_at_stage(n, v.certificate.stage_bound);
  return v;
}

// ============================================================
//  Unique-path inversion
// ============================================================

/// First n bits of the unique preimage of y: grows the preimage tree level
/// by level until every surviving node agrees on n bits.
inline BitString unique_path_invert(const Representation& rep, const BitSource& y, std::size_t n,
                                    std::size_t depth_cap, std::size_t max_frontier = 1 << 16) {
  std::vector<BitString> level{BitString{}};
  for (std::size_t m = 0;; ++m) {
    std::vector<BitString> alive;
    for (auto& sigma : level) {
      if (rep.image_prefix_of(sigma, y, rep.output_cap())) alive.push_back(std::move(sigma));
    }
    if (alive.empty()) {
      throw DomainError("y not in range at depth " + std::to_string(m));
    }
    if (m >= n) {
      const BitString head = alive.front().prefix(n);
      bool agree = std::all_of(alive.begin(), alive.end(),
                               [&](const BitString& s) { return s.prefix(n) == head; });
      if (agree) return head;
    }
    if (m >= depth_cap || m >= rep.depth() || alive.size() * 2 > max_frontier) {
      throw DomainError("fiber not provably singleton at desk scale (depth " + std::to_string(m) +
                        ", " + std::to_string(alive.size()) + " live nodes)");
    }
    level.clear();
    for (const auto& sigma : alive) {
      BitString a = sigma, b = sigma;
      a.push_back(false);
      b.push_back(true);
      level.push_back(std::move(a));
      level.push_back(std::move(b));
    }
  }
}

/// g(y;j) = bit j of the unique preimage; reads y through the tape.
inline InverterUnderTest tree_inverter(const RealFunction& f, std::size_t depth_cap) {
  Representation rep(f, depth_cap, 4 * depth_cap + 8);
  return {RealFunction("tree(" + f.descriptor() + ")",
                       [rep, depth_cap](OracleTape& tape, Natural j) {
                         BitSource y("tape", [&tape](Natural p) { return tape.read(p); });
                         return unique_path_invert(rep, y, j + 1, depth_cap)[j];
                       }),
          true, false};
}

// ============================================================
//  Fiber branch counting
// ============================================================

struct FiberCount {
  std::uint64_t branches = 0;   // depth-d words that extend to a consistent input
  std::uint64_t surviving = 0;  // depth-d words whose image is compatible with y
};

struct FiberOptions {
  std::size_t lookahead = 0;  // read barrier D; 0 means max(depth, |y|)
  std::uint64_t step_budget = 100'000;
  std::size_t max_leaves = 1 << 16;
};

namespace detail {

enum class BitOutcome { match, mismatch, unchecked, unknown };

struct BitProbe {
  BitOutcome outcome;
  Natural unassigned = 0;
};

inline BitProbe probe_bit(const RealFunction& f, const PartialAssignment& a, Natural j,
                          bool expected, const TapeLimits& limits) {
  OracleTape tape(a, limits);
  try {
    return {f.bit(tape, j) == expected ? BitOutcome::match : BitOutcome::mismatch};
  } catch (const BarrierHit&) {
    return {BitOutcome::unchecked};
  } catch (const Diverges&) {
    return {BitOutcome::mismatch};
  } catch (const UnassignedRead& r) {
    return {BitOutcome::unknown, r.position};
  }
}

class FiberSearch {
 public:
  FiberSearch(const RealFunction& f, const BitString& y, std::size_t depth,
              const FiberOptions& opt, Natural barrier)
      : f_(f), y_(y), depth_(depth), opt_(opt), limits_{barrier, opt.step_budget} {}

  void run(PartialAssignment a, std::vector<Natural> pending) {
    if (!propagate(a, pending)) return;
    if (pending.empty()) {
      if (++leaves_ > opt_.max_leaves) throw DomainError("fiber search: too many branches");
      restrictions_.insert(a.restricted_below(depth_).to_string());
      kept_.emplace(a.restricted_below(depth_).to_string(), a.restricted_below(depth_));
      return;
    }
    const Natural p = probe_bit(f_, a, pending.front(), y_[pending.front()], limits_).unassigned;
    for (bool b : {false, true}) {
      PartialAssignment next = a;
      next.assign(p, b);
      run(std::move(next), pending);
    }
  }

  std::uint64_t count() const {
    std::set<BitString> words;
    for (const auto& [key, a] : kept_) {
      for (auto& w : a.expand(depth_)) words.insert(std::move(w));
    }
    return words.size();
  }

 private:
  // Settles every bit that needs no branching; forces a position when one
  // of its two values contradicts y.  False when the branch is dead.
  bool propagate(PartialAssignment& a, std::vector<Natural>& pending) {
    for (bool progress = true; progress && !pending.empty();) {
      progress = false;
      std::vector<Natural> still;
      for (std::size_t idx = 0; idx < pending.size(); ++idx) {
        const Natural j = pending[idx];
        const bool want = y_[j];
        BitProbe pr = probe_bit(f_, a, j, want, limits_);
        if (pr.outcome == BitOutcome::mismatch) return false;
        if (pr.outcome != BitOutcome::unknown) {
          progress = true;
          continue;
        }
        PartialAssignment zero = a, one = a;
        zero.assign(pr.unassigned, false);
        one.assign(pr.unassigned, true);
        const bool dead0 = probe_bit(f_, zero, j, want, limits_).outcome == BitOutcome::mismatch;
        const bool dead1 = probe_bit(f_, one, j, want, limits_).outcome == BitOutcome::mismatch;
        if (dead0 && dead1) return false;
        if (dead0 || dead1) {
          a.assign(pr.unassigned, dead0);
          progress = true;
        }
        still.push_back(j);
      }
      pending = std::move(still);
    }
    return true;
  }

  const RealFunction& f_;
  const BitString& y_;
  std::size_t depth_;
  FiberOptions opt_;
  TapeLimits limits_;
  std::size_t leaves_ = 0;
  std::set<std::string> restrictions_;
  std::map<std::string, PartialAssignment> kept_;
};

}  // namespace detail

/// Finite-depth evidence for |f^{-1}(y)|.  `branches` counts the depth-d
/// words that extend, below the barrier D, to an input whose every
/// checkable output bit j < |y| equals y(j); positions f never reads stay
/// free and are what make a fiber fat.  `surviving` is the plain count of
/// depth-d words whose read-barrier image is prefix-compatible with y.
inline FiberCount fiber_branch_count(const RealFunction& f, const BitString& y_prefix,
                                     std::size_t depth, const FiberOptions& opt = {}) {
  if (depth > 20) throw DomainError("fiber depth " + std::to_string(depth) + " too large");
  FiberCount out;

  Representation rep(f, depth, y_prefix.size(), opt.step_budget);
  for (const auto& sigma : all_words(depth)) {
    if (rep(sigma).compatible_with(y_prefix)) ++out.surviving;
  }

  const Natural barrier = opt.lookahead ? opt.lookahead : std::max(depth, y_prefix.size());
  detail::FiberSearch search(f, y_prefix, depth, opt, std::max<Natural>(barrier, depth));
  std::vector<Natural> pending(y_prefix.size());
  for (Natural j = 0; j < pending.size(); ++j) pending[j] = j;
  search.run(PartialAssignment{}, std::move(pending));
  out.branches = search.count();
  return out;
}

}  // namespace cantor
