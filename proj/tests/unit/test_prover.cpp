#include <gtest/gtest.h>

#include "pdlkit/prover.hpp"
#include "pdlkit/semantics.hpp"
#include "support/gen.hpp"

using namespace pdl;

namespace {
Sequent S(const char* s) { return parse_sequent(s); }
const SystemSpec seq00{System::Seq00, false, false};
}  // namespace

TEST(Prove, Examples) {
    auto a = prove(S("x, ~x"));
    ASSERT_TRUE(a.proved);
    EXPECT_EQ(a.deriv->rule, Rule::Ax);

    auto b = prove(S("<p>x, [p]~x"));
    ASSERT_TRUE(b.proved);
    EXPECT_EQ(b.deriv->rule, Rule::Gen);
    EXPECT_EQ(b.deriv->kids[0]->rule, Rule::Ax);
    EXPECT_TRUE(check(seq00, b.deriv).valid);

    auto c = prove(S("[p]x"));
    EXPECT_FALSE(c.proved);
    EXPECT_FALSE(c.trace.empty());
    EXPECT_FALSE(sequent_valid(S("[p]x")).valid);
}

TEST(Prove, RejectsOutsideFragment) {
    EXPECT_THROW(prove(S("<p*>x")), ShapeError);
    EXPECT_THROW(prove(S("[p;q]x")), ShapeError);
    EXPECT_TRUE(prove(S("[p;q]x, <p><q>~x"), System::Seq0).proved);
}

TEST(Prove, ManyPrograms) {
    EXPECT_TRUE(prove(S("[p]x, [q]y, <p>~x")).proved);
    EXPECT_FALSE(prove(S("[p]x, <q>~x")).proved);
}

TEST(Circuit, Examples) {
    EXPECT_TRUE(eval_circuit(S("x | ~x")));
    EXPECT_FALSE(eval_circuit(S("(x & y), ~x")));
    EXPECT_FALSE(eval_circuit(S("<p>x")));
}

TEST(Circuit, AgreesWithProver) {
    testgen::Gen g(17);
    g.progs = {"p"};
    for (int i = 0; i < 400; ++i) {
        Sequent s = g.sequent(1 + i % 3, 5);
        EXPECT_EQ(eval_circuit(s), prove(s).proved) << render(s);
    }
}

TEST(Prove, SpaceDiscipline) {
    testgen::Gen g(19);
    for (int i = 0; i < 200; ++i) {
        Sequent s = g.sequent(2, 7);
        auto r = prove(s);
        EXPECT_LE(r.stats.peakPath, r.stats.depthBound) << render(s);
        EXPECT_LE(r.stats.peakSequent, 2 * sequent_size(s) + 2);
    }
}

TEST(Prove, Conservativity) {
    testgen::Gen g(23);
    for (int i = 0; i < 300; ++i) {
        Formula y = g.propositional(1 + i % 11);
        EXPECT_EQ(prove({y}).proved, taut_check(y)) << render(y);
    }
}

TEST(Prove, MemoGivesSameVerdicts) {
    testgen::Gen g(29);
    for (int i = 0; i < 200; ++i) {
        Sequent s = g.sequent(2, 6);
        auto a = prove(s);
        auto b = prove(s, System::Seq00, true);
        ASSERT_EQ(a.proved, b.proved) << render(s);
        if (b.proved) EXPECT_TRUE(check(seq00, b.deriv).valid);
    }
}

TEST(Trace, JsonShapes) {
    auto r = prove(S("[p]x, y"));
    ASSERT_FALSE(r.proved);
    auto j = trace_to_json(r.trace);
    ASSERT_TRUE(j.is_array());
    EXPECT_TRUE(j.back().contains("step"));
    auto t = search_tree_to_json(build_search_tree(S("[p]x, [p]y, <p>~x")));
    EXPECT_TRUE(t.contains("kind"));
}
