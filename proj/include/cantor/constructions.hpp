#pragma once
// constructions.hpp - the one-way maps, the partial injection and the
// marker-driven two-to-one maps, each parameterized by a staged enumeration.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cantor/bitcore.hpp"
#include "cantor/enumeration.hpp"
#include "cantor/streams.hpp"

namespace cantor {

// ============================================================
//  Movable marker
// ============================================================

enum class Permission { none, halting, z };

inline const char* to_string(Permission p) {
  switch (p) {
    case Permission::none: return "none";
    case Permission::halting: return "halting";
    case Permission::z: return "z";
  }
  return "?";
}

/// State at stage s: marker k_s, update counter d_s, the selected position
/// p_s, and which permission (if any) updated k at s.
struct MarkerRecord {
  Natural stage = 0;
  Natural k = 0;
  Natural d = 0;
  Natural p = 0;
  Permission permission = Permission::none;
};

struct MarkerTrace {
  std::vector<MarkerRecord> records;  // stages 0..stages-1
  Natural final_k = 0;                // k at stage `stages`
  Natural final_d = 0;

  std::size_t stages() const noexcept { return records.size(); }
  Natural k_at(Natural s) const { return s < records.size() ? records[s].k : final_k; }
  Natural d_at(Natural s) const { return s < records.size() ? records[s].d : final_d; }
};

/// Which marker quantity the permissions are keyed on: k itself, or the
/// number of updates d.
enum class MarkerKey { marker, counter };

/// One stage at a time: with key value v (k or d), the marker is updated
/// to s+1 when v ∈ W_s (halting permission, checked first) or when the
/// z-predicate holds (z-permission).
class MarkerMachine {
 public:
  MarkerMachine(const StagedEnumeration& w, MarkerKey key) : w_(&w), key_(key) {}

  template <class ZPermission>
  MarkerRecord advance(ZPermission&& z_permission) {
    const Natural s = stage_;
    const Natural v = key_ == MarkerKey::marker ? k_ : d_;
    MarkerRecord rec{s, k_, d_, s + 1, Permission::none};
    if (w_->member_at_stage(v, s)) {
      rec.permission = Permission::halting;
    } else if (z_permission(v, s)) {
      rec.permission = Permission::z;
    }
    if (rec.permission != Permission::none) {
      rec.p = k_;
      k_ = s + 1;
      ++d_;
    }
    ++stage_;
    return rec;
  }

  Natural stage() const noexcept { return stage_; }
  Natural k() const noexcept { return k_; }
  Natural d() const noexcept { return d_; }

 private:
  const StagedEnumeration* w_;
  MarkerKey key_;
  Natural stage_ = 0;
  Natural k_ = 0;
  Natural d_ = 0;
};

template <class ZPermission>
MarkerTrace run_marker(const StagedEnumeration& w, Natural stages, MarkerKey key,
                       ZPermission&& z_permission) {
  if (stages > 0 && stages - 1 > w.horizon()) throw HorizonError(stages - 1, w.horizon());
  MarkerMachine m(w, key);
  MarkerTrace trace;
  trace.records.reserve(stages);
  for (Natural s = 0; s < stages; ++s) trace.records.push_back(m.advance(z_permission));
  trace.final_k = m.k();
  trace.final_d = m.d();
  return trace;
}

/// z-permission of k at s iff z(<k,s>) = 1.
inline MarkerTrace marker_run_v1(const StagedEnumeration& w, const BitSource& z, Natural stages) {
  return run_marker(w, stages, MarkerKey::marker,
                    [&](Natural k, Natural s) { return z(pair(k, s)); });
}

/// z-permission at s iff column d of z has a prefix in U_s.
inline MarkerTrace marker_run_v2(const StagedEnumeration& w, const StagedStringEnumeration& u,
                                 const BitSource& z, Natural stages) {
  if (stages > 0 && stages - 1 > u.horizon()) throw HorizonError(stages - 1, u.horizon());
  return run_marker(w, stages, MarkerKey::counter, [&](Natural d, Natural s) {
    return u.column_hit([&](Natural i) { return z(pair(d, i)); }, s);
  });
}

/// The first violated trace invariant, if any.
inline std::optional<std::string> check_marker_invariants(const MarkerTrace& t) {
  std::set<Natural> used;
  Natural max_p = 0;
  for (Natural s = 0; s < t.stages(); ++s) {
    const auto& r = t.records[s];
    const Natural k_next = t.k_at(s + 1);
    const Natural d_next = t.d_at(s + 1);
    const std::string at = " at stage " + std::to_string(s);
    if (k_next != r.k && k_next != s + 1) return "k jumps to neither k_s nor s+1" + at;
    if (d_next < r.d || d_next > r.d + 1) return "d is not a unit step" + at;
    if ((d_next != r.d) != (k_next != r.k)) return "d and k updates disagree" + at;
    if ((r.permission != Permission::none) != (k_next != r.k)) return "permission mismatch" + at;
    if (!used.insert(r.p).second) return "p repeats value " + std::to_string(r.p) + at;
    max_p = std::max(max_p, r.p);
    // {p_t : t < S} = {0..S} \ {k_S} with S = s+1: S distinct values, all
    // at most S, none equal to k_S.
    const Natural S = s + 1;
    if (max_p > S || used.contains(k_next) || k_next > S) {
      return "selected range differs from {0..S}\\{k_S}" + at;
    }
  }
  if (t.stages() == 0 && t.final_k != 0) return "k_0 must be 0";
  return std::nullopt;
}

// ============================================================
//  Bit selection
// ============================================================

/// An injection p : N → N.  `inverse`, when set, must return n with
/// p(n) = m, or nothing when m is outside the range.
struct SelectionMap {
  std::string name;
  std::function<Natural(Natural)> forward;
  std::function<std::optional<Natural>(Natural)> inverse;
};

namespace selections {

inline SelectionMap identity() {
  return {"identity", [](Natural n) { return n; },
          [](Natural m) { return std::optional<Natural>(m); }};
}

inline SelectionMap doubling() {
  return {"double", [](Natural n) { return 2 * n; },
          [](Natural m) { return m % 2 == 0 ? std::optional<Natural>(m / 2) : std::nullopt; }};
}

inline SelectionMap shift() {
  return {"shift", [](Natural n) { return n + 1; },
          [](Natural m) { return m > 0 ? std::optional<Natural>(m - 1) : std::nullopt; }};
}

/// p(<n,s>) = 2n if n enters w at s, 2<n,s>+1 otherwise.
inline SelectionMap surjection(const StagedEnumeration& w) {
  auto forward = [w](Natural m) {
    auto [n, s] = unpair(m);
    return w.new_element_at(s) == n ? 2 * n : 2 * m + 1;
  };
  auto inverse = [w](Natural q) -> std::optional<Natural> {
    if (q % 2 == 0) {
      auto s = w.entry_stage(q / 2);
      if (!s) return std::nullopt;
      return pair(q / 2, *s);
    }
    const Natural m = (q - 1) / 2;
    auto [n, s] = unpair(m);
    if (w.new_element_at(s) == n) return std::nullopt;
    return m;
  };
  return {"surj", forward, inverse};
}

}  // namespace selections

/// f(x;n) = x(p(n)).  Non-injectivity met while evaluating is an error.
inline RealFunction bit_select(const SelectionMap& p) {
  return RealFunction("bitselect:" + p.name, [p](OracleTape& t, Natural j) {
    const Natural m = p.forward(j);
    if (p.inverse) {
      if (p.inverse(m) != j) {
        throw DomainError("selection map " + p.name + " not injective at " + std::to_string(j));
      }
    } else {
      for (Natural i = 0; i < j; ++i) {
        t.step();
        if (p.forward(i) == m) {
          throw DomainError("selection map " + p.name + " not injective: p(" + std::to_string(i) +
                            ") = p(" + std::to_string(j) + ")");
        }
      }
    }
    return t.read(m);
  });
}

/// x(m) = y(n) when m = p(n), 0 elsewhere; bit_select(p) maps it to y.
inline BitSource preimage_witness(const SelectionMap& p, const BitSource& y) {
  if (!p.inverse) throw DomainError("selection map " + p.name + " has no inverse");
  return BitSource("witness:" + p.name + ":" + y.description(), [p, y](Natural m) {
    auto n = p.inverse(m);
    return n ? y(*n) : false;
  });
}

/// The positions x must match for f = bit_select(p) to land in ⟦τ⟧:
/// {x : x(p(i)) = τ(i) for i < |τ|}.
inline PartialAssignment selection_preimage(const SelectionMap& p, const BitString& tau) {
  PartialAssignment a;
  for (std::size_t i = 0; i < tau.size(); ++i) a.assign(p.forward(i), tau[i]);
  return a;
}

// ============================================================
//  The one-way maps
// ============================================================

/// f(x;<n,s>) = x(n) if n enters w at s, 0 otherwise.
inline RealFunction simple_one_way(const StagedEnumeration& w) {
  return RealFunction("simple", [w](OracleTape& t, Natural m) {
    auto [n, s] = unpair(m);
    return w.new_element_at(s) == n ? t.read(n) : false;
  });
}

inline RealFunction one_way_surjection(const StagedEnumeration& w) {
  return bit_select(selections::surjection(w));
}

/// f(x) = p(x) ⊕ q(x); q(x;n) = 0 when every 1 of x at positions ≤ n lies in
/// the decided set, undefined otherwise.
inline RealFunction partial_injection(const StagedEnumeration& w, const DecidedSet& d) {
  if (!d.consistent_with(w)) throw DomainError("decided set inconsistent with enumeration");
  RealFunction p = simple_one_way(w);
  return RealFunction("inj", [p, d](OracleTape& t, Natural j) {
    if (j % 2 == 0) return p.bit(t, j / 2);
    const Natural n = j / 2;
    for (Natural i = 0; i <= n; ++i) {
      t.step();
      if (t.read(i) && !d.contains(i)) {
        throw Diverges{"q: x(" + std::to_string(i) + ")=1 outside the decided set"};
      }
    }
    return false;
  });
}

// ============================================================
//  Two-to-one maps f(x ⊕ z) = h^z(x) ⊕ z
// ============================================================

namespace detail {

/// Output bit j of x⊕z ↦ h^z(x)⊕z, where select(t, tape) returns p_t
/// reading z through the tape.
template <class Select>
RealFunction two_to_one(std::string name, Select select) {
  return RealFunction(std::move(name), [select](OracleTape& tape, Natural j) {
    if (j % 2 == 1) return tape.read(j);
    const Natural p = select(j / 2, tape);
    return tape.read(2 * p);
  });
}

}  // namespace detail

inline RealFunction two_to_one_v1(const StagedEnumeration& w) {
  return detail::two_to_one("two1", [w](Natural t, OracleTape& tape) {
    MarkerMachine m(w, MarkerKey::marker);
    MarkerRecord rec;
    for (Natural s = 0; s <= t; ++s) {
      tape.step();
      rec = m.advance([&](Natural k, Natural st) { return tape.read(2 * pair(k, st) + 1); });
    }
    return rec.p;
  });
}

inline RealFunction two_to_one_v2(const StagedEnumeration& w, const StagedStringEnumeration& u) {
  return detail::two_to_one("two2", [w, u](Natural t, OracleTape& tape) {
    if (t > u.horizon()) throw HorizonError(t, u.horizon());
    MarkerMachine m(w, MarkerKey::counter);
    MarkerRecord rec;
    for (Natural s = 0; s <= t; ++s) {
      tape.step();
      rec = m.advance([&](Natural d, Natural st) {
        return u.column_hit([&](Natural i) { return tape.read(2 * pair(d, i) + 1); }, st);
      });
    }
    return rec.p;
  });
}

/// ζ verbatim, then z(<i,s>) = 0 for i = n and 1 otherwise: the marker
/// sticks on n unless n is enumerated.
inline BitSource z_builder_v1(Natural n, const BitString& zeta) {
  return BitSource("zbuild:" + std::to_string(n) + ":" + zeta.to_string(),
                   [n, zeta](Natural p) {
                     if (p < zeta.size()) return zeta[p];
                     return unpair(p).first != n;
                   });
}

/// w with its nth column replaced by y.
inline BitSource replace_column(const BitSource& w, Natural n, const BitSource& y) {
  return sources::columns({{n, y}}, w,
                          "replace:" + std::to_string(n) + ":" + w.description() + ":" +
                              y.description());
}

/// Least s with d_s = n under the counter-keyed marker.
inline Natural stage_where_counter_reaches(const StagedEnumeration& w,
                                           const StagedStringEnumeration& u, const BitSource& z,
                                           Natural n) {
  const Natural limit = std::min(w.horizon(), u.horizon());
  MarkerMachine m(w, MarkerKey::counter);
  auto hit = [&](Natural d, Natural s) {
    return u.column_hit([&](Natural i) { return z(pair(d, i)); }, s);
  };
  while (m.d() < n) {
    if (m.stage() > limit) {
      throw DomainError("update counter stuck at " + std::to_string(m.d()) + " through stage " +
                        std::to_string(limit) + ", never reaches " + std::to_string(n));
    }
    m.advance(hit);
  }
  return m.stage();
}

/// The stage where the counter reaches n, the marker value there, and the
/// first later stage (through `through`) where that marker is released.
struct CounterProbe {
  Natural stage = 0;
  Natural marker = 0;
  std::optional<Natural> released_at;
};

inline CounterProbe probe_counter(const StagedEnumeration& w, const StagedStringEnumeration& u,
                                  const BitSource& z, Natural n, Natural through) {
  CounterProbe probe;
  probe.stage = stage_where_counter_reaches(w, u, z, n);
  if (through > std::min(w.horizon(), u.horizon())) {
    throw HorizonError(through, std::min(w.horizon(), u.horizon()));
  }
  const MarkerTrace t = marker_run_v2(w, u, z, through + 1);
  probe.marker = t.k_at(probe.stage);
  for (Natural s = probe.stage; s <= through; ++s) {
    if (t.records[s].permission != Permission::none) {
      probe.released_at = s;
      break;
    }
  }
  return probe;
}

}  // namespace cantor
