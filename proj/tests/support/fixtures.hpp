#pragma once
// Star-free instances of the Hilbert axioms and derivations for them whose
// leaves are extended axioms F, ~F, ctx.
#include <string>
#include <utility>
#include <vector>

#include "pdlkit/calculus.hpp"
#include "pdlkit/formula.hpp"
#include "pdlkit/prover.hpp"

namespace fixtures {

using namespace pdl;

inline Formula imp(Formula a, Formula b) { return Formula::disj(seq_negate(a), b); }
inline Formula iff(Formula a, Formula b) { return Formula::conj(imp(a, b), imp(b, a)); }

struct AxiomInstance {
    std::string name;
    Formula formula;
};

inline std::vector<AxiomInstance> axiom_instances() {
    auto f = [](const char* s) { return parse_formula(s); };
    auto P = [](const char* s) { return parse_program(s); };
    Formula A = f("[p]x"), B = f("<q>y | z"), C = f("x & [p;q]~z");
    Program p = P("p"), pq = P("p;q"), q = P("q"), u = P("p+q");
    std::vector<AxiomInstance> out;
    // propositional schemata with modal atoms
    out.push_back({"D1_weakening", imp(A, imp(B, A))});
    out.push_back({"D1_distribution", imp(imp(A, imp(B, C)), imp(imp(A, B), imp(A, C)))});
    out.push_back({"D1_contraposition", imp(imp(seq_negate(A), seq_negate(B)), imp(B, A))});
    // K
    out.push_back({"D2_atomic", imp(Formula::box(p, imp(A, B)), imp(Formula::box(p, A), Formula::box(p, B)))});
    out.push_back({"D2_compound", imp(Formula::box(u, imp(B, C)), imp(Formula::box(u, B), Formula::box(u, C)))});
    // box over conjunction
    out.push_back({"D3", iff(Formula::box(pq, Formula::conj(A, B)), Formula::conj(Formula::box(pq, A), Formula::box(pq, B)))});
    // composition
    out.push_back({"D4", iff(Formula::box(Program::comp(p, q), B), Formula::box(p, Formula::box(q, B)))});
    out.push_back({"D4_nested", iff(Formula::box(Program::comp(u, pq), C), Formula::box(u, Formula::box(pq, C)))});
    // union
    out.push_back({"D5", iff(Formula::box(u, A), Formula::conj(Formula::box(p, A), Formula::box(q, A)))});
    out.push_back({"D5_nested", iff(Formula::box(Program::uni(pq, q), B), Formula::conj(Formula::box(pq, B), Formula::box(q, B)))});
    return out;
}

namespace detail {

inline Sequent replaceAt(const Sequent& s, std::size_t i, const Sequent& with) {
    Sequent out;
    for (std::size_t k = 0; k < s.size(); ++k)
        if (k != i) out.push_back(s[k]);
    out.insert(out.end(), with.begin(), with.end());
    return out;
}

}  // namespace detail

// Invertible decomposition (Or, And, union and composition at the top) until
// some member's seq-negation is present, then the extended axiom for that
// pair. Sequents that need a modal step fall back to Seq0 proof search.
inline DerivPtr axplus_derivation(const Sequent& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (i != j && s[j] == s[i].negate()) {
                Sequent ctx;
                for (std::size_t k = 0; k < s.size(); ++k)
                    if (k != i && k != j) ctx.push_back(s[k]);
                auto ax = extended_axiom(s[i], ctx);
                if (ax->rule == Rule::Ax) return make_ax(s);
                return infer_node(s, ax->rule, ax->kids);
            }
    for (std::size_t i = 0; i < s.size(); ++i) {
        Formula f = s[i];
        if (f.kind() == FKind::Or)
            return infer_node(s, Rule::Or, {axplus_derivation(detail::replaceAt(s, i, {f.left(), f.right()}))});
        if (f.kind() == FKind::And)
            return infer_node(s, Rule::And,
                              {axplus_derivation(detail::replaceAt(s, i, {f.left()})),
                               axplus_derivation(detail::replaceAt(s, i, {f.right()}))});
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        Formula f = s[i];
        if (!f.is_modal()) continue;
        Program p = f.prog();
        bool box = f.is_box();
        if (p.kind() == ProgKind::Comp) {
            Formula g = Formula::modal(box, p.left(), Formula::modal(box, p.right(), f.body()));
            return infer_node(s, box ? Rule::BoxComp : Rule::DiaComp, {axplus_derivation(detail::replaceAt(s, i, {g}))});
        }
        if (p.kind() == ProgKind::Union) {
            Formula l = Formula::modal(box, p.left(), f.body()), r = Formula::modal(box, p.right(), f.body());
            if (box)
                return infer_node(s, Rule::BoxUnion,
                                  {axplus_derivation(detail::replaceAt(s, i, {l})),
                                   axplus_derivation(detail::replaceAt(s, i, {r}))});
            return infer_node(s, Rule::DiaUnion, {axplus_derivation(detail::replaceAt(s, i, {l, r}))});
        }
    }
    auto r = prove(s, System::Seq0);
    if (!r.proved) throw ShapeError("axplus_derivation: " + render(s) + " is not provable");
    return r.deriv;
}

}  // namespace fixtures
