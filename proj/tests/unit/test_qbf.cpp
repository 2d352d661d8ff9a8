#include <gtest/gtest.h>

#include "pdlkit/expansion.hpp"
#include "pdlkit/qbf.hpp"
#include "pdlkit/semantics.hpp"
#include "support/gen.hpp"

using namespace pdl;

namespace {
Formula F(const char* s) { return parse_formula(s); }
const Program p = Program::atom("p");

const XiRow& rowFor(const ConvertedBcnf& c, std::vector<int> xi) {
    for (const auto& r : c.rows)
        if (r.xi == xi) return r;
    throw std::runtime_error("no row");
}
}  // namespace

TEST(Convert, OneByOne) {
    BdnfShape a = recognize_bdnf(F("f | (f1 & [p]g1) | (f2 & <p>h1)"));
    ConvertedBcnf c = bdnf_to_bcnf(a);
    EXPECT_EQ(c.s, 1);
    EXPECT_EQ(c.t, 1);
    EXPECT_EQ(c.rows.size(), 4u);
    const XiRow& both = rowFor(c, {2, 2});
    EXPECT_EQ(both.B, F("f"));
    EXPECT_EQ(both.C, F("h1"));
    EXPECT_EQ(both.J, std::vector<int>{1});
    ASSERT_EQ(both.D.size(), 1u);
    EXPECT_EQ(both.D[0], F("g1"));
    const XiRow& ones = rowFor(c, {1, 1});
    ASSERT_TRUE(ones.B);
    EXPECT_TRUE(multiset_equal(disjuncts(*ones.B), {F("f"), F("f1"), F("f2")}));
    EXPECT_FALSE(ones.C);
    EXPECT_TRUE(ones.J.empty());
    EXPECT_EQ(c.n(), 2);
    EXPECT_NO_THROW(recognize_bcnf(render_bcnf(c.shape())));
}

TEST(Convert, EquivalentOnSmallFrames) {
    Formula a = F("x | (y & [p]z) | (~x & <p>y) | (z & <p>~y)");
    ConvertedBcnf c = bdnf_to_bcnf(recognize_bdnf(a));
    Formula r = render_bcnf(c.shape());
    testgen::Gen g(31);
    for (int trial = 0; trial < 300; ++trial) {
        KripkeFrame k;
        k.worlds = 1 + g.pick(3);
        for (int u = 0; u < k.worlds; ++u) {
            for (int v = 0; v < k.worlds; ++v)
                if (g.coin(0.4)) k.add_edge("p", u, v);
            for (const char* x : {"x", "y", "z"})
                if (g.coin()) k.set_true(x, u);
        }
        for (int w = 0; w < k.worlds; ++w) EXPECT_EQ(eval(k, w, a), eval(k, w, r));
    }
}

TEST(FEval, Examples) {
    BcnfShape allTaut;
    allTaut.prog = p;
    allTaut.rows.push_back(BcnfRow{F("x | ~x"), F("y"), {}});
    allTaut.rows.push_back(BcnfRow{F("y | ~y"), std::nullopt, {F("z")}});
    EXPECT_TRUE(f_eval(0, F("x | ~x"), allTaut));

    BcnfShape single;
    single.prog = p;
    single.rows.push_back(BcnfRow{F("x"), std::nullopt, {}});
    EXPECT_TRUE(f_eval(0, F("~x"), single));

    BcnfShape none;
    none.prog = p;
    none.rows.push_back(BcnfRow{F("x"), F("y"), {}});
    for (int i = 0; i < 5; ++i) EXPECT_FALSE(f_eval(i, F("z"), none));
}

TEST(DecideBdne, TautologousZ) {
    for (const char* s : {"<p*>(x | (y & [p]z) | (w & <p>v)) | y | ~y", "<p*>((x & [p]z) | (~x & <p>x)) | (z | ~z)"})
        for (Via v : {Via::F, Via::Expansion, Via::Qbf}) EXPECT_TRUE(decide_bdne(F(s), v)) << s << " via " << via_name(v);
}

TEST(DecideBdne, AgreesWithBcneAndOracle) {
    const char* cases[] = {"<p*>(x | (y & [p]~x) | (~y & <p>x)) | ~x", "<p*>((x & [p]y) | (~x & <p>~y)) | y",
                           "<p*>(~x | (x & [p]x) | <p>x)", "<p*>((y & [p]x) | <p>(x | y))"};
    for (const char* s : cases) {
        BdneInstance inst = bdne_instance(F(s));
        bool f = decide_bdne(inst, Via::F).valid;
        EXPECT_EQ(f, decide_bdne(inst, Via::Expansion).valid) << s;
        EXPECT_EQ(f, decide_bdne(inst, Via::Qbf).valid) << s;
        EXPECT_EQ(f, star_closure_valid(inst.body, inst.Z, p).valid) << s;
    }
}

TEST(DecideBdne, XiCount) {
    auto inst = bdne_instance(F("<p*>((a & [p]b) | (c & [p]d) | (e & <p>f) | <p>g) | h"));
    BdneDecision d = decide_bdne(inst);
    EXPECT_EQ(d.xiCount, 16u);
    EXPECT_LT(d.n, d.converted.s * (1 << (d.converted.s + d.converted.t)));
}

TEST(Qbf, EmitEvalAndExport) {
    auto inst = bdne_instance(F("<p*>(x | (y & [p]~x) | (~y & <p>x)) | ~x"));
    QbfFormula q = emit_qbf(inst);
    EXPECT_EQ(qbf_eval(q), decide_bdne(inst).valid);
    for (const auto& node : q.nodes)
        if (node.kind == QbfFormula::Kind::Leaf) {
            auto vars = variables(node.matrix);
            EXPECT_EQ(std::set<std::string>(node.vars.begin(), node.vars.end()), vars);
        }
    QdimacsExport ex = export_qdimacs(q);
    EXPECT_EQ(check_qdimacs(ex.text), qbf_eval(q));
    EXPECT_THROW(export_qdimacs(q, 3), BoundError);
    auto j = qbf_to_json(q);
    EXPECT_TRUE(j.contains("root"));
}

TEST(Qbf, OneRowHasSingleForallBlock) {
    auto inst = bdne_instance(F("<p*>((x & [p]y) | <p>~x) | y"));
    QdimacsExport ex = export_qdimacs(emit_qbf(inst));
    std::istringstream in(ex.text);
    std::string line;
    int forall = 0, exists = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind("p cnf", 0) == 0) header = true;
        if (line.rfind("a ", 0) == 0) ++forall;
        if (line.rfind("e ", 0) == 0) ++exists;
    }
    EXPECT_TRUE(header);
    EXPECT_EQ(forall, 1);
    EXPECT_LE(exists, 1);
}

TEST(Qbf, SizeGrowsWithRows) {
    std::vector<std::size_t> sizes;
    for (int t = 1; t <= 4; ++t) {
        std::string s = "<p*>((x & [p]y)";
        for (int j = 0; j < t; ++j) s += " | (v" + std::to_string(j) + " & <p>w" + std::to_string(j) + ")";
        s += ") | z";
        sizes.push_back(emit_qbf(bdne_instance(F(s.c_str()))).dag_size());
    }
    for (std::size_t i = 1; i < sizes.size(); ++i) EXPECT_GT(sizes[i], sizes[i - 1]);
}
