#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cantor/streams.hpp"

using namespace cantor;

namespace {

BitString word(const char* s) { return BitString(s); }

// Local fixtures written straight from their definitions.
RealFunction select_even() {
  return RealFunction("even", [](OracleTape& t, Natural j) { return t.read(2 * j); });
}

RealFunction xor_pairs() {
  return RealFunction("xor", [](OracleTape& t, Natural j) { return t.read(j) != t.read(j + 1); });
}

std::vector<RealFunction> total_fixtures() {
  return {functions::identity(), select_even(), xor_pairs(), functions::interleave_with_zeros(),
          functions::shift_right(), functions::constant(sources::periodic(word("011")))};
}

// Oracle for map(σ): bit j is valid iff computing it on σ0^ω reads only
// positions below |σ|.  Stops at the first invalid bit.
BitString image_by_use(const RealFunction& f, const BitString& sigma, std::size_t cap) {
  BitString out;
  for (Natural j = 0; j < cap; ++j) {
    OracleTape tape(sources::finite(sigma));
    const bool b = f.bit(tape, j);
    if (tape.use() > sigma.size()) break;
    out.push_back(b);
  }
  return out;
}

}  // namespace

TEST(Sources, Definitions) {
  EXPECT_EQ(sources::finite(word("101")).prefix(6).to_string(), "101000");
  EXPECT_EQ(sources::periodic(word("10")).prefix(5).to_string(), "10101");
  EXPECT_EQ(sources::ones().prefix(3).to_string(), "111");
  EXPECT_EQ(sources::flipped(sources::zeros(), 2).prefix(4).to_string(), "0010");
  EXPECT_EQ(sources::interleaved(sources::ones(), sources::zeros()).prefix(4).to_string(), "1010");
  EXPECT_EQ(sources::prefixed(word("11"), sources::zeros()).prefix(4).to_string(), "1100");
  EXPECT_THROW(sources::periodic(BitString{}), DomainError);
}

TEST(Sources, Columns) {
  const BitSource base = sources::random(9);
  const BitSource col = sources::column(base, 3);
  for (Natural i = 0; i < 50; ++i) EXPECT_EQ(col(i), base(pair(3, i)));
  const BitSource joined = sources::columns({{2, sources::ones()}}, sources::zeros());
  for (Natural p = 0; p < 200; ++p) EXPECT_EQ(joined(p), unpair(p).first == 2);
}

TEST(Sources, Deterministic) {
  const BitSource a = sources::random(42), b = sources::random(42), c = sources::random(43);
  EXPECT_EQ(a.prefix(256), b.prefix(256));
  EXPECT_NE(a.prefix(256), c.prefix(256));
  EXPECT_EQ(a.description(), "random:42");
}

TEST(Tape, UseIsMaxReadPlusOne) {
  OracleTape t(sources::ones());
  EXPECT_EQ(t.use(), 0u);
  t.read(4);
  EXPECT_EQ(t.use(), 5u);
  t.read(1);
  EXPECT_EQ(t.use(), 5u);
}

TEST(Tape, BarrierAndAssignment) {
  OracleTape barrier(sources::ones(), TapeLimits{3});
  EXPECT_TRUE(barrier.read(2));
  EXPECT_THROW(barrier.read(3), BarrierHit);

  PartialAssignment a;
  a.assign(1, true);
  OracleTape backed(a, TapeLimits{});
  EXPECT_TRUE(backed.read(1));
  try {
    backed.read(0);
    FAIL();
  } catch (const UnassignedRead& r) {
    EXPECT_EQ(r.position, 0u);
  }
}

TEST(Evaluate, Examples) {
  auto e = evaluate(functions::identity(), sources::zeros(), 4);
  EXPECT_EQ(e.bits.to_string(), "0000");
  EXPECT_EQ(e.use, 4u);
  auto s = evaluate(select_even(), sources::periodic(word("10")), 3);
  EXPECT_EQ(s.bits.to_string(), "111");
  EXPECT_EQ(s.use, 5u);
}

TEST(Evaluate, InterleaveOutputs) {
  const RealFunction f = functions::identity(), g = select_even();
  const RealFunction h = functions::interleave_outputs(f, g);
  const BitSource x = sources::random(5);
  const BitString fb = evaluate(f, x, 20).bits, gb = evaluate(g, x, 20).bits;
  EXPECT_EQ(evaluate(h, x, 40).bits, interleave(fb, gb));
}

TEST(Evaluate, DivergenceNamesTheBit) {
  RealFunction spin("spin", [](OracleTape& t, Natural j) {
    if (j < 3) return t.read(j);
    for (;;) t.step();
  });
  try {
    evaluate(spin, sources::zeros(), 8, EvalOptions{1000});
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.index(), 3u);
    EXPECT_NE(std::string(e.what()).find("divergence at desk scale"), std::string::npos);
  }
  EXPECT_EQ(evaluate(spin, sources::zeros(), 3).bits.to_string(), "000");
}

TEST(Evaluate, Deterministic) {
  for (const auto& f : total_fixtures()) {
    const BitSource x = sources::random(17);
    auto a = evaluate(f, x, 64), b = evaluate(f, x, 64);
    EXPECT_EQ(a.bits, b.bits) << f.descriptor();
    EXPECT_EQ(a.use, b.use) << f.descriptor();
  }
}

TEST(Representation, Examples) {
  Representation id(functions::identity(), 8);
  EXPECT_EQ(id(word("01")).to_string(), "01");
  Representation ev(select_even(), 8);
  EXPECT_EQ(ev(word("0")).to_string(), "0");
  EXPECT_EQ(ev(word("011")).to_string(), "01");
  EXPECT_THROW(ev(BitString::zeros(9)), DomainError);
}

TEST(Representation, AgreesWithUseOracle) {
  for (const auto& f : total_fixtures()) {
    Representation rep(f, 8, 24);
    for (std::size_t d = 0; d <= 8; ++d)
      for (const auto& s : all_words(d)) ASSERT_EQ(rep(s), image_by_use(f, s, 24)) << f.descriptor();
  }
}

TEST(Representation, MonotoneExhaustive) {
  for (const auto& f : total_fixtures()) {
    Representation rep(f, 10, 32);
    for (std::size_t d = 0; d < 10; ++d) {
      for (const auto& s : all_words(d)) {
        const BitString img = rep(s);
        ASSERT_TRUE(img.is_prefix_of(rep(s + word("0")))) << f.descriptor() << " " << s.to_string();
        ASSERT_TRUE(img.is_prefix_of(rep(s + word("1")))) << f.descriptor() << " " << s.to_string();
      }
    }
  }
}

TEST(Representation, MonotoneRandomDeep) {
  std::mt19937_64 rng(23);
  for (const auto& f : total_fixtures()) {
    Representation rep(f, 200, 400);
    for (int t = 0; t < 30; ++t) {
      BitString tau;
      for (std::size_t i = 0, n = rng() % 200; i < n; ++i) tau.push_back(rng() & 1);
      const BitString sigma = tau.prefix(rng() % (tau.size() + 1));
      EXPECT_TRUE(rep(sigma).is_prefix_of(rep(tau))) << f.descriptor();
    }
  }
}

namespace {

std::vector<std::string> strings(const std::vector<BitString>& v) {
  std::vector<std::string> out;
  for (const auto& w : v) out.push_back(w.to_string());
  return out;
}

}  // namespace

TEST(PreimageTree, Examples) {
  Representation id(functions::identity(), 4);
  EXPECT_EQ(strings(preimage_tree(id, sources::zeros(), 2)),
            (std::vector<std::string>{"", "0", "00"}));
  Representation k(functions::constant(sources::zeros()), 4);
  EXPECT_EQ(strings(preimage_tree(k, sources::zeros(), 1)), (std::vector<std::string>{"", "0", "1"}));
  Representation ev(select_even(), 4);
  EXPECT_EQ(strings(preimage_tree(ev, sources::ones(), 2)),
            (std::vector<std::string>{"", "1", "10", "11"}));
}

TEST(PreimageTree, PrefixClosedAndMatchesBruteForce) {
  std::mt19937_64 rng(31);
  for (const auto& f : total_fixtures()) {
    Representation rep(f, 8, 32);
    for (int t = 0; t < 4; ++t) {
      // t == 0 takes y in the range of f
      const BitSource y = t == 0 ? sources::finite(evaluate(f, sources::zeros(), 64).bits)
                                 : sources::random(rng());
      for (std::size_t d = 0; d <= 8; ++d) {
        const auto tree = preimage_tree(rep, y, d);
        std::set<BitString> in(tree.begin(), tree.end());
        // prefix-closed
        for (const auto& s : tree)
          if (!s.empty()) ASSERT_TRUE(in.contains(s.prefix(s.size() - 1))) << f.descriptor();
        // brute force over every word of length ≤ d
        for (std::size_t m = 0; m <= d; ++m) {
          for (const auto& s : all_words(m)) {
            const BitString img = image_by_use(f, s, 32);
            const bool prefix_of_y = img == y.prefix(img.size());
            ASSERT_EQ(in.contains(s), prefix_of_y) << f.descriptor() << " " << s.to_string();
          }
        }
        // on the range, depth-d members witness their ancestors
        for (const auto& s : tree) {
          if (t != 0) break;
          bool extended = false;
          for (const auto& t2 : tree) extended = extended || (t2.size() == d && s.is_prefix_of(t2));
          ASSERT_TRUE(extended) << f.descriptor() << " " << s.to_string();
        }
      }
    }
  }
}

TEST(UseSoundness, PassesForHonestEvaluators) {
  EXPECT_TRUE(use_soundness_check(select_even(), sources::zeros(), 2, 10).sound);
  EXPECT_TRUE(use_soundness_check(functions::identity(), sources::zeros(), 3, 10).sound);
  for (const auto& f : total_fixtures())
    EXPECT_TRUE(use_soundness_check(f, sources::random(3), 40, 20, 1).sound) << f.descriptor();
}

TEST(UseSoundness, CatchesPeeking) {
  RealFunction peek("peek", [](OracleTape& t, Natural j) {
    return t.read(j) != t.source()(j + 100);
  });
  const UseVerdict v = use_soundness_check(peek, sources::zeros(), 8, 20, 2);
  EXPECT_FALSE(v.sound);
  ASSERT_TRUE(v.differing_bit.has_value());
  EXPECT_LT(*v.differing_bit, 8u);
  EXPECT_NE(v.describe().find("fail"), std::string::npos);
}
