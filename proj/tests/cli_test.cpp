#include <gtest/gtest.h>

#include <sstream>

#include "cantor/cli.hpp"

using namespace cantor;

namespace {

const std::string kData = CANTOR_TEST_DATA;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cantor");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

}  // namespace

TEST(Cli, EvalExample) {
  auto r = run({"eval", "--fn", "bitselect:identity", "--input", "zeros", "--bits", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0000 use=4\n");
  auto d = run({"eval", "--fn", "bitselect:double", "--input", "periodic:10", "--bits", "3"});
  EXPECT_EQ(d.out, "111 use=5\n");
}

TEST(Cli, EvalSources) {
  auto r = run({"eval", "--fn", "identity", "--input", "interleave(ones,flip:1:zeros)", "--bits", "6"});
  EXPECT_EQ(r.out, "101110 use=6\n");
  auto p = run({"eval", "--fn", "identity", "--input", "prefix:011:ones", "--bits", "5"});
  EXPECT_EQ(p.out, "01111 use=5\n");
  auto c = run({"eval", "--fn", "identity", "--input", "columns(" + data("cols.txt") + ")", "--bits",
                "13"});
  // column 0 = 1000..., column 2 = 0110...: positions pair(0,0)=0 and pair(2,1)=7, pair(2,2)=12
  EXPECT_EQ(c.out, "1000000100001 use=13\n");
}

TEST(Cli, MeasureExample) {
  auto r = run({"measure", "--prefixset", data("code.txt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1/1\n");
  auto s = run({"measure", "--prefixset", data("code.txt"), "--sigma", "011"});
  EXPECT_EQ(s.out, "1/8\n");
}

TEST(Cli, ExitCodes) {
  auto overlap = run({"measure", "--prefixset", data("overlap.txt")});
  EXPECT_EQ(overlap.code, 2);
  EXPECT_EQ(overlap.err.rfind("error: ", 0), 0u);
  EXPECT_EQ(std::count(overlap.err.begin(), overlap.err.end(), '\n'), 1);

  EXPECT_EQ(run({"eval", "--fn", "nonsense", "--input", "zeros", "--bits", "4"}).code, 1);
  EXPECT_EQ(run({"eval", "--fn", "identity", "--input", "zer0s", "--bits", "4"}).code, 1);
  EXPECT_EQ(run({"eval", "--fn", "identity", "--bits", "4"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"measure", "--prefixset", data("missing.txt")}).code, 1);
  EXPECT_EQ(run({"eval", "--fn", "simple:" + data("bad.enum"), "--input", "zeros", "--bits", "4"}).code,
            2);
  // divergence of the partial injection is a domain error
  auto div = run({"eval", "--fn", "inj:" + data("small.enum") + ":" + data("small.decided"),
                  "--input", "flip:1:zeros", "--bits", "8"});
  EXPECT_EQ(div.code, 2);
  EXPECT_NE(div.err.find("divergence at desk scale"), std::string::npos);
}

TEST(Cli, ConstructionDescriptorsRoundTrip) {
  const std::vector<std::string> specs{
      "bitselect:double",
      "bitselect:shift",
      "bitselect:identity",
      "simple:" + data("small.enum"),
      "surj:collatz",
      "simple:collatz:32:500",
      "inj:" + data("small.enum") + ":" + data("small.decided"),
      "inj:collatz:enum",
      "two1:empty",
      "two2:" + data("small.enum") + ":" + data("small.u"),
      "shift-right",
      "interleave-zeros",
      "identity"};
  for (const auto& s : specs) {
    const ConstructionHandle h = parse_construction(s);
    EXPECT_EQ(h.descriptor(), s);
    const ConstructionHandle again = parse_construction(h.descriptor());
    // partial maps may diverge off their domain; the outcome must still agree
    auto outcome = [](const RealFunction& f) -> std::string {
      try {
        return evaluate(f, sources::random(5), 40).bits.to_string();
      } catch (const DivergenceError& e) {
        return e.what();
      }
    };
    EXPECT_EQ(outcome(h.function), outcome(again.function)) << s;
  }
}

TEST(Cli, ExtractVerdicts) {
  auto r = run({"extract", "--mode", "simple", "--fn", "simple:" + data("single.enum"), "--inverter",
                "reference", "--n", "1", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "n=1 member=false use=0 stagebound=0\n"
            "n=2 member=true use=8 stagebound=8\n");
  auto all = run({"extract", "--mode", "two1", "--fn", "two1:" + data("small.enum"), "--below",
                  "12"});
  EXPECT_EQ(all.code, 0);
  std::istringstream lines(all.out);
  std::string line;
  std::set<Natural> members;
  Natural count = 0;
  while (std::getline(lines, line)) {
    ++count;
    if (line.find("member=true") != std::string::npos) members.insert(std::stoull(line.substr(2)));
  }
  EXPECT_EQ(count, 12u);
  EXPECT_EQ(members, (std::set<Natural>{0, 2, 3}));

  auto rnd = run({"extract", "--mode", "randomized", "--fn", "surj:" + data("small.enum"), "--n",
                  "3", "--sigma", "1"});
  EXPECT_EQ(rnd.code, 0);
  EXPECT_EQ(rnd.out.rfind("n=3 member=true", 0), 0u);

  auto wrong_mode = run({"extract", "--mode", "two1", "--fn", "simple:" + data("small.enum"), "--n", "1"});
  EXPECT_EQ(wrong_mode.code, 1);
  auto refuted = run({"extract", "--mode", "simple", "--fn", "simple:" + data("single.enum"),
                      "--inverter", "flip:2", "--n", "2"});
  EXPECT_EQ(refuted.code, 2);
}

TEST(Cli, InvertTreeAndFiber) {
  auto inv = run({"invert-tree", "--fn", "interleave-zeros", "--target",
                  "interleave(periodic:110,zeros)", "--bits", "9", "--depth", "16"});
  EXPECT_EQ(inv.code, 0);
  EXPECT_EQ(inv.out, "110110110\n");
  auto fat = run({"invert-tree", "--fn", "bitselect:double", "--target", "ones", "--bits", "4",
                  "--depth", "12"});
  EXPECT_EQ(fat.code, 2);
  auto fib = run({"fiber", "--fn", "bitselect:double", "--target", "10", "--depth", "4"});
  EXPECT_EQ(fib.out, "branches=4 surviving=4\n");
}

TEST(Cli, DemoPropSimplePasses) {
  auto r = run({"demo", "prop-simple"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.substr(r.out.size() - 5), "PASS\n");
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) rows += !line.empty() && std::isdigit(line[0]);
  EXPECT_EQ(rows, 64);
}

TEST(Cli, OutputIsReproducible) {
  const std::vector<std::string> args{"eval", "--fn", "two1:collatz", "--input", "random:7", "--bits",
                                      "64"};
  EXPECT_EQ(run(args).out, run(args).out);
  EXPECT_EQ(run({"demo", "thm-two1"}).out, run({"demo", "thm-two1"}).out);
}
