#pragma once
// spec.hpp - the textual mini-languages for sources, enumerations,
// constructions and inverters.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cantor/bitcore.hpp"
#include "cantor/constructions.hpp"
#include "cantor/enumeration.hpp"
#include "cantor/inversion.hpp"
#include "cantor/streams.hpp"

namespace cantor {

namespace detail {

inline Natural parse_natural(std::string_view t, std::string_view what) {
  if (t.empty() || t.size() > 19 || t.find_first_not_of("0123456789") != std::string_view::npos) {
    throw ParseError("bad " + std::string(what) + ": '" + std::string(t) + "'");
  }
  return static_cast<Natural>(std::stoull(std::string(t)));
}

inline std::ifstream open_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

/// Splits "a,b" at the top-level comma.
inline std::pair<std::string_view, std::string_view> split_args(std::string_view inner,
                                                                std::string_view whole) {
  int depth = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (inner[i] == '(') ++depth;
    if (inner[i] == ')') --depth;
    if (inner[i] == ',' && depth == 0) return {inner.substr(0, i), inner.substr(i + 1)};
  }
  throw ParseError("expected two arguments in '" + std::string(whole) + "'");
}

}  // namespace detail

// ============================================================
//  Sources
// ============================================================

/// Column file: lines "c WORD"; column c is WORD then zeros, columns not
/// listed are zero.
inline BitSource load_columns(const std::string& path) {
  auto in = detail::open_file(path);
  std::map<Natural, BitSource> cols;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string c, word, extra;
    if (!(fields >> c)) continue;
    if (!(fields >> word) || (fields >> extra)) throw ParseError("bad column line: '" + line + "'");
    const Natural n = detail::parse_natural(c, "column index");
    if (!cols.emplace(n, sources::finite(BitString(word))).second) {
      throw ParseError("column " + c + " given twice");
    }
  }
  return sources::columns(std::move(cols), sources::zeros(), "columns(" + path + ")");
}

/// zeros | ones | periodic:W | finite:W | flip:N:SPEC | prefix:W:SPEC |
/// random:SEED | interleave(SPEC,SPEC) | columns(FILE)
inline BitSource parse_source(std::string_view spec) {
  auto after = [&](std::string_view head) { return spec.substr(head.size()); };
  auto starts = [&](std::string_view head) { return spec.starts_with(head); };
  if (spec == "zeros") return sources::zeros();
  if (spec == "ones") return sources::ones();
  if (starts("periodic:")) return sources::periodic(BitString(after("periodic:")));
  if (starts("finite:")) return sources::finite(BitString(after("finite:")));
  if (starts("random:")) return sources::random(detail::parse_natural(after("random:"), "seed"));
  if (starts("flip:") || starts("prefix:")) {
    const bool flip = starts("flip:");
    std::string_view rest = after(flip ? "flip:" : "prefix:");
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParseError("bad source '" + std::string(spec) + "'");
    BitSource tail = parse_source(rest.substr(colon + 1));
    if (flip) return sources::flipped(tail, detail::parse_natural(rest.substr(0, colon), "position"));
    return sources::prefixed(BitString(rest.substr(0, colon)), tail);
  }
  if (starts("interleave(") && spec.ends_with(")")) {
    auto inner = spec.substr(11, spec.size() - 12);
    auto [a, b] = detail::split_args(inner, spec);
    return sources::interleaved(parse_source(a), parse_source(b));
  }
  if (starts("columns(") && spec.ends_with(")")) {
    return load_columns(std::string(spec.substr(8, spec.size() - 9)));
  }
  throw ParseError("unknown source '" + std::string(spec) + "'");
}

// ============================================================
//  Enumerations
// ============================================================

inline constexpr Natural kToyMaxElement = 64;
inline constexpr Natural kToyMaxStage = 10'000;

/// FILE | collatz | collatz:MAXELEM:MAXSTAGE | empty
inline StagedEnumeration load_enumeration(const std::string& token) {
  if (token == "empty") return StagedEnumeration::from_pairs({}, kToyMaxStage);
  if (token == "collatz") return collatz_toy(kToyMaxElement, kToyMaxStage);
  if (token.starts_with("collatz:")) {
    std::string_view rest = std::string_view(token).substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw ParseError("bad enumeration '" + token + "'");
    return collatz_toy(detail::parse_natural(rest.substr(0, colon), "max element"),
                       detail::parse_natural(rest.substr(colon + 1), "max stage"));
  }
  auto in = detail::open_file(token);
  return parse_enumeration(in);
}

/// FILE | enum (the members of w through its horizon)
inline DecidedSet load_decided(const std::string& token, const StagedEnumeration& w) {
  if (token == "enum") return DecidedSet::from_enumeration(w);
  auto in = detail::open_file(token);
  return parse_decided_set(in);
}

inline StagedStringEnumeration load_string_enumeration(const std::string& path) {
  auto in = detail::open_file(path);
  return parse_string_enumeration(in);
}

// ============================================================
//  Constructions
// ============================================================

struct ConstructionHandle {
  enum class Family {
    simpleOneWay,
    bitSelect,
    oneWaySurjection,
    partialInjection,
    twoToOneV1,
    twoToOneV2,
    fixture,  // identity, shift-right, interleave-zeros
  };

  Family family;
  RealFunction function;  // descriptor() is the spec string
  std::optional<StagedEnumeration> w;
  std::optional<DecidedSet> decided;
  std::optional<StagedStringEnumeration> u;
  std::optional<SelectionMap> selection;

  const std::string& descriptor() const noexcept { return function.descriptor(); }
};

/// simple:ENUM | surj:ENUM | bitselect:double|shift|identity |
/// inj:ENUM:DECIDED | two1:ENUM | two2:ENUM:UFILE |
/// identity | shift-right | interleave-zeros
inline ConstructionHandle parse_construction(std::string_view spec_view) {
  using F = ConstructionHandle::Family;
  const std::string spec(spec_view);
  auto renamed = [&](const RealFunction& f) {
    return RealFunction(spec, [f](OracleTape& t, Natural j) { return f.bit(t, j); });
  };
  auto field = [&](std::string_view head) { return spec.substr(head.size()); };

  if (spec == "identity") return {F::fixture, functions::identity()};
  if (spec == "shift-right") return {F::fixture, functions::shift_right()};
  if (spec == "interleave-zeros") return {F::fixture, functions::interleave_with_zeros()};

  if (spec.starts_with("bitselect:")) {
    const std::string name = field("bitselect:");
    SelectionMap p = name == "double"     ? selections::doubling()
                     : name == "shift"    ? selections::shift()
                     : name == "identity" ? selections::identity()
                                          : throw ParseError("unknown selection map '" + name + "'");
    ConstructionHandle h{F::bitSelect, bit_select(p)};
    h.selection = p;
    return h;
  }
  if (spec.starts_with("simple:") || spec.starts_with("surj:") || spec.starts_with("two1:")) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    StagedEnumeration w = load_enumeration(spec.substr(colon + 1));
    if (kind == "simple") {
      ConstructionHandle h{F::simpleOneWay, renamed(simple_one_way(w))};
      h.w = w;
      return h;
    }
    if (kind == "surj") {
      ConstructionHandle h{F::oneWaySurjection, renamed(one_way_surjection(w))};
      h.w = w;
      h.selection = selections::surjection(w);
      return h;
    }
    ConstructionHandle h{F::twoToOneV1, renamed(two_to_one_v1(w))};
    h.w = w;
    return h;
  }
  if (spec.starts_with("inj:") || spec.starts_with("two2:")) {
    const bool inj = spec.starts_with("inj:");
    const std::string rest = field(inj ? "inj:" : "two2:");
    // the enumeration token may itself contain colons (collatz:A:B)
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw ParseError("bad construction '" + spec + "'");
    StagedEnumeration w = load_enumeration(rest.substr(0, colon));
    const std::string second = rest.substr(colon + 1);
    if (inj) {
      DecidedSet d = load_decided(second, w);
      ConstructionHandle h{F::partialInjection, renamed(partial_injection(w, d))};
      h.w = w;
      h.decided = d;
      return h;
    }
    StagedStringEnumeration u = load_string_enumeration(second);
    ConstructionHandle h{F::twoToOneV2, renamed(two_to_one_v2(w, u))};
    h.w = w;
    h.u = u;
    return h;
  }
  throw ParseError("unknown construction '" + spec + "'");
}

// ============================================================
//  Inverters
// ============================================================

/// Output bit `position` of g negated.
inline InverterUnderTest flip_output(const InverterUnderTest& g, Natural position) {
  RealFunction inner = g.g;
  return {RealFunction("flip:" + std::to_string(position) + ":" + inner.descriptor(),
                       [inner, position](OracleTape& t, Natural j) {
                         const bool b = inner.bit(t, j);
                         return j == position ? !b : b;
                       }),
          g.declared_total, g.binary};
}

/// reference | zero | flip:N, for the inverse of `target`.
inline InverterUnderTest parse_inverter(std::string_view spec, const ConstructionHandle& target) {
  using F = ConstructionHandle::Family;
  auto reference = [&]() -> InverterUnderTest {
    switch (target.family) {
      case F::simpleOneWay: return reference_inverter_simple(*target.w);
      case F::oneWaySurjection: return reference_inverter_surjection(*target.w);
      case F::twoToOneV1: return reference_inverter_two_to_one_v1(*target.w);
      case F::twoToOneV2: return reference_inverter_two_to_one_v2(*target.w, *target.u);
      default:
        throw DomainError("no reference inverter for '" + target.descriptor() + "'");
    }
  };
  if (spec == "reference") return reference();
  if (spec == "zero") {
    return {functions::constant(sources::zeros()), true,
            target.family == F::oneWaySurjection};
  }
  if (spec.starts_with("flip:")) {
    return flip_output(reference(), detail::parse_natural(spec.substr(5), "flip position"));
  }
  throw ParseError("unknown inverter '" + std::string(spec) + "'");
}

}  // namespace cantor
