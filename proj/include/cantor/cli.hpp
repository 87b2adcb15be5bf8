#pragma once
// cli.hpp - command dispatch for the cantor tool.  run() is what main()
// calls; tests call it directly.
//
//   eval        --fn SPEC --input SRC --bits N
//   invert-tree --fn SPEC --target SRC --bits N --depth D
//   extract     --mode simple|randomized|two1 --fn SPEC --inverter SPEC --n K...
//   measure     --prefixset FILE [--sigma WORD]
//   fiber       --fn SPEC --target WORD --depth D [--lookahead D]
//   demo        prop-simple|thm-surjection|thm-two1
//
// Exit codes: 0 success, 1 parse error, 2 domain error, 3 demo failure.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "cantor/bitcore.hpp"
#include "cantor/constructions.hpp"
#include "cantor/enumeration.hpp"
#include "cantor/inversion.hpp"
#include "cantor/spec.hpp"
#include "cantor/streams.hpp"

namespace cantor::cli {

inline constexpr int kOk = 0;
inline constexpr int kParseError = 1;
inline constexpr int kDomainError = 2;
inline constexpr int kDemoFailed = 3;

// ============================================================
//  Demos
// ============================================================

struct DemoRow {
  Natural n = 0;
  bool expected = false;
  std::optional<ExtractionVerdict> verdict;
  std::string error;

  bool ok() const { return verdict && verdict->member == expected; }
};

inline bool print_demo(std::ostream& out, const std::string& title,
                       const std::vector<DemoRow>& rows) {
  out << "# " << title << "\n";
  out << std::left << std::setw(5) << "n" << std::setw(9) << "truth" << std::setw(9) << "verdict"
      << std::setw(8) << "use" << std::setw(12) << "stagebound"
      << "agree\n";
  bool all = true;
  for (const auto& r : rows) {
    out << std::left << std::setw(5) << r.n << std::setw(9) << (r.expected ? "true" : "false");
    if (r.verdict) {
      out << std::setw(9) << (r.verdict->member ? "true" : "false") << std::setw(8)
          << r.verdict->certificate.use << std::setw(12) << r.verdict->certificate.stage_bound;
    } else {
      out << std::setw(9) << "error" << std::setw(8) << "-" << std::setw(12) << "-";
    }
    out << (r.ok() ? "yes" : "NO") << (r.error.empty() ? "" : "  " + r.error) << "\n";
    all = all && r.ok();
  }
  out << (all ? "PASS" : "FAIL") << "\n";
  return all;
}

template <class Extract>
std::vector<DemoRow> demo_rows(const StagedEnumeration& w, Natural below, Extract&& extract) {
  std::vector<DemoRow> rows;
  for (Natural n = 0; n < below; ++n) {
    DemoRow r;
    r.n = n;
    r.expected = w.entry_stage(n).has_value();
    try {
      r.verdict = extract(n);
    } catch (const DomainError& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline bool demo_prop_simple(std::ostream& out) {
  const StagedEnumeration w = collatz_toy(kToyMaxElement, kToyMaxStage);
  const InverterUnderTest g = reference_inverter_simple(w);
  auto rows = demo_rows(w, 64, [&](Natural n) { return extract_simple(g, w, n); });
  return print_demo(out, "simple one-way map, collatz toy, reference inverter, n < 64", rows);
}

inline bool demo_thm_surjection(std::ostream& out) {
  const StagedEnumeration w = collatz_toy(kToyMaxElement, kToyMaxStage);
  const InverterUnderTest g = reference_inverter_surjection(w);
  auto rows = demo_rows(w, 32, [&](Natural n) {
    return extract_randomized(g, BitString{}, w, n).verdict;
  });
  return print_demo(out, "measure-preserving surjection, sigma = empty word, n < 32", rows);
}

inline bool demo_thm_two1(std::ostream& out) {
  const StagedEnumeration w = collatz_toy(kToyMaxElement, kToyMaxStage);
  const InverterUnderTest g = reference_inverter_two_to_one_v1(w);
  auto rows = demo_rows(w, 32, [&](Natural n) { return extract_two_to_one(g, w, n); });
  return print_demo(out, "two-to-one map, marker blueprint, n < 32", rows);
}

// ============================================================
//  Dispatch
// ============================================================

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Computable one-way maps on Cantor space, their inverters and extractors", "cantor"};
  app.require_subcommand(1);

  std::string fn, input, target, mode, inverter = "reference", prefixset, sigma, upsilon, zeta;
  std::string target_word, demo_name;
  std::size_t bits = 0, depth = 0, lookahead = 0;
  std::vector<Natural> ns;
  std::optional<Natural> below;

  auto* eval = app.add_subcommand("eval", "evaluate a construction on a source");
  eval->add_option("--fn", fn, "construction spec")->required();
  eval->add_option("--input", input, "source spec")->required();
  eval->add_option("--bits", bits, "output bits")->required();

  auto* inv = app.add_subcommand("invert-tree", "unique-path inversion");
  inv->add_option("--fn", fn, "construction spec")->required();
  inv->add_option("--target", target, "source spec of y")->required();
  inv->add_option("--bits", bits, "preimage bits")->required();
  inv->add_option("--depth", depth, "depth cap")->required();

  auto* ext = app.add_subcommand("extract", "decide membership through an inverter");
  ext->add_option("--mode", mode, "simple|randomized|two1")
      ->required()
      ->check(CLI::IsMember({"simple", "randomized", "two1"}));
  ext->add_option("--fn", fn, "construction spec")->required();
  ext->add_option("--inverter", inverter, "reference|zero|flip:N");
  auto* n_opt = ext->add_option("--n", ns, "element(s) to decide");
  auto* below_opt = ext->add_option("--below", below, "decide every n below this");
  n_opt->excludes(below_opt);
  ext->add_option("--sigma", sigma, "cylinder for randomized mode");
  ext->add_option("--upsilon", upsilon, "y prefix for two1 mode");
  ext->add_option("--zeta", zeta, "z prefix for two1 mode");

  auto* meas = app.add_subcommand("measure", "measure of a prefix-free set");
  meas->add_option("--prefixset", prefixset, "file, '-' for stdin")->required();
  meas->add_option("--sigma", sigma, "intersect with this cylinder");

  auto* fib = app.add_subcommand("fiber", "fiber branch count");
  fib->add_option("--fn", fn, "construction spec")->required();
  fib->add_option("--target", target_word, "output prefix")->required();
  fib->add_option("--depth", depth, "input depth")->required();
  fib->add_option("--lookahead", lookahead, "read barrier (default max(depth, |target|))");

  auto* demo = app.add_subcommand("demo", "scripted end-to-end reduction");
  demo->add_option("name", demo_name, "prop-simple|thm-surjection|thm-two1")
      ->required()
      ->check(CLI::IsMember({"prop-simple", "thm-surjection", "thm-two1"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (*eval) {
      const ConstructionHandle h = parse_construction(fn);
      const Evaluation e = evaluate(h.function, parse_source(input), bits);
      out << e.bits.to_string() << " use=" << e.use << "\n";
    } else if (*inv) {
      const ConstructionHandle h = parse_construction(fn);
      Representation rep(h.function, depth, 4 * depth + 8);
      out << unique_path_invert(rep, parse_source(target), bits, depth).to_string() << "\n";
    } else if (*ext) {
      const ConstructionHandle h = parse_construction(fn);
      const std::map<std::string, ConstructionHandle::Family> wanted{
          {"simple", ConstructionHandle::Family::simpleOneWay},
          {"randomized", ConstructionHandle::Family::oneWaySurjection},
          {"two1", ConstructionHandle::Family::twoToOneV1}};
      if (h.family != wanted.at(mode)) {
        throw ParseError("mode " + mode + " needs a " +
                         std::string(mode == "simple" ? "simple" : mode == "two1" ? "two1" : "surj") +
                         ": construction");
      }
      const InverterUnderTest g = parse_inverter(inverter, h);
      if (below) {
        ns.clear();
        for (Natural n = 0; n < *below; ++n) ns.push_back(n);
      }
      if (ns.empty()) throw ParseError("extract needs --n or --below");
      for (Natural n : ns) {
        ExtractionVerdict v;
        if (mode == "simple") v = extract_simple(g, *h.w, n);
        if (mode == "randomized") v = extract_randomized(g, BitString(sigma), *h.w, n).verdict;
        if (mode == "two1") v = extract_two_to_one(g, *h.w, n, BitString(upsilon), BitString(zeta));
        out << v.line() << "\n";
      }
    } else if (*meas) {
      PrefixFreeSet set = [&] {
        if (prefixset == "-") return parse_prefix_set(std::cin);
        auto in = detail::open_file(prefixset);
        return parse_prefix_set(in);
      }();
      out << to_string(meas->count("--sigma") ? intersect_measure(set, BitString(sigma))
                                              : measure(set))
          << "\n";
    } else if (*fib) {
      const ConstructionHandle h = parse_construction(fn);
      FiberOptions opt;
      opt.lookahead = lookahead;
      const FiberCount c = fiber_branch_count(h.function, BitString(target_word), depth, opt);
      out << "branches=" << c.branches << " surviving=" << c.surviving << "\n";
    } else if (*demo) {
      bool ok = demo_name == "prop-simple"      ? demo_prop_simple(out)
                : demo_name == "thm-surjection" ? demo_thm_surjection(out)
                                                : demo_thm_two1(out);
      return ok ? kOk : kDemoFailed;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

}  // namespace cantor::cli
