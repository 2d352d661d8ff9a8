#include <gtest/gtest.h>

#include "pdlkit/semantics.hpp"
#include "support/gen.hpp"

using namespace pdl;

namespace {
Formula F(const char* s) { return parse_formula(s); }
KripkeFrame twoWorlds() {
    KripkeFrame k;
    k.worlds = 2;
    k.add_edge("p", 0, 1);
    k.set_true("x", 1);
    return k;
}
}  // namespace

TEST(Eval, Examples) {
    KripkeFrame k = twoWorlds();
    EXPECT_TRUE(eval(k, 0, F("<p>x")));
    EXPECT_TRUE(eval(k, 0, F("<p*>x")));
    EXPECT_FALSE(eval(k, 0, F("[p*]x")));
    KripkeFrame e;
    e.worlds = 3;
    for (int w = 0; w < 3; ++w) EXPECT_TRUE(eval(e, w, F("[p]x")));
}

TEST(Eval, ProgramOperations) {
    KripkeFrame k;
    k.worlds = 3;
    k.add_edge("p", 0, 1);
    k.add_edge("q", 1, 2);
    k.set_true("x", 2);
    EXPECT_TRUE(eval(k, 0, F("<p;q>x")));
    EXPECT_FALSE(eval(k, 0, F("<q;p>x")));
    EXPECT_TRUE(eval(k, 0, F("<(p+q)*>x")));
    EXPECT_FALSE(eval(k, 0, F("[p+q]x")));
    EXPECT_THROW(eval(k, 5, F("x")), std::exception);
}

TEST(Eval, StarMatchesUnrolling) {
    testgen::Gen g(5);
    for (int trial = 0; trial < 60; ++trial) {
        KripkeFrame k;
        k.worlds = 1 + g.pick(4);
        for (int u = 0; u < k.worlds; ++u) {
            for (int v = 0; v < k.worlds; ++v)
                if (g.coin(0.3)) k.add_edge("p", u, v);
            if (g.coin()) k.set_true("x", u);
        }
        for (int w = 0; w < k.worlds; ++w) {
            bool any = false;
            Formula cur = F("x");
            for (int m = 0; m <= k.worlds; ++m) {
                any = any || eval(k, w, cur);
                cur = Formula::dia(Program::atom("p"), cur);
            }
            EXPECT_EQ(eval(k, w, F("<p*>x")), any);
        }
    }
}

TEST(FrameJson, RoundTrip) {
    KripkeFrame k = twoWorlds();
    auto j = frame_to_json(k);
    EXPECT_EQ(j["worlds"], 2);
    KripkeFrame back = frame_from_json(j);
    EXPECT_EQ(frame_to_json(back), j);
}

TEST(Validity, Examples) {
    EXPECT_TRUE(sequent_valid(parse_sequent("x, ~x")).valid);
    Verdict v = sequent_valid(parse_sequent("[p]x"));
    ASSERT_FALSE(v.valid);
    ASSERT_TRUE(v.frame);
    EXPECT_EQ(v.frame->worlds, 2);
    EXPECT_FALSE(eval(*v.frame, v.world, F("[p]x")));
    Verdict d = sequent_valid(parse_sequent("<p>x, [p]~x"));
    EXPECT_TRUE(d.valid);
    EXPECT_TRUE(d.authoritative);
}

TEST(Validity, CountermodelsAreGenuine) {
    testgen::Gen g(21);
    for (int i = 0; i < 200; ++i) {
        Sequent s = g.sequent(2, 5);
        Verdict v = sequent_valid(s);
        EXPECT_TRUE(v.authoritative);
        if (!v.valid)
            for (auto f : s) EXPECT_FALSE(eval(*v.frame, v.world, f)) << render(s);
    }
}

TEST(Taut, Examples) {
    EXPECT_TRUE(taut_check(F("x | ~x")));
    EXPECT_FALSE(taut_check(F("x")));
    EXPECT_TRUE(taut_check(F("(x & y) | ~x | ~y")));
    EXPECT_THROW(taut_check(F("[p]x")), ShapeError);
}

TEST(Taut, AgreesWithOneWorldSearch) {
    testgen::Gen g(9);
    for (int i = 0; i < 200; ++i) {
        Formula y = g.propositional(1 + i % 9);
        Verdict v = sequent_valid_bounded({y}, 1, 0);
        EXPECT_TRUE(v.authoritative);
        EXPECT_EQ(taut_check(y), v.valid) << render(y);
    }
}

TEST(StarClosure, AgreesWithSmallFrames) {
    Verdict v = star_closure_valid(F("x | <p>x"), F("~x"), Program::atom("p"));
    EXPECT_TRUE(v.valid);
    Verdict c = star_closure_valid(F("x & [p]y"), std::nullopt, Program::atom("p"));
    ASSERT_FALSE(c.valid);
    EXPECT_FALSE(eval(*c.frame, c.world, F("<p*>(x & [p]y)")));
}
