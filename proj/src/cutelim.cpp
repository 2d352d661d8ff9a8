#include "pdlkit/cutelim.hpp"

#include <stdexcept>

namespace pdl {

Ordinal deg(const DerivPtr& d) {
    Ordinal out;
    std::vector<const Derivation*> stack{d.get()};
    while (!stack.empty()) {
        const Derivation* n = stack.back();
        stack.pop_back();
        if (n->rule == Rule::Cut) out = max(out, succ(o_complexity(*n->cut)));
        for (const auto& k : n->kids) stack.push_back(k.get());
    }
    return out;
}

namespace {

Ordinal natHeight(const DerivPtr& d) { return Ordinal::nat(height(d)); }

// Shrink a derivation of `have` (a super-multiset of `want` with only
// duplicated extras) to `want` by contraction.
DerivPtr contractTo(DerivPtr d, const Sequent& want) {
    for (auto f : multiset_minus(d->seq, want)) d = contract(d, f);
    if (!multiset_equal(d->seq, want)) throw std::logic_error("contractTo: endsequent mismatch");
    return d;
}

DerivPtr cutSum(DerivPtr l, DerivPtr r, Formula c) { return make_cut(std::move(l), std::move(r), c); }

struct Reducer {
    std::string lastCase;

    // Derivation of Gamma + Pi from left: C, Gamma and right: ~C, Pi (both
    // cut-free), with every cut formula of lower complexity than C.
    DerivPtr reduce(const DerivPtr& left, const DerivPtr& right, Formula c) {
        if (c.has_star()) throw ShapeError("cut formula " + render(c) + " contains a star");
        // orient so that the left cut formula is a literal, a disjunction or a diamond
        if (c.kind() == FKind::And || c.is_box()) return reduce(right, left, c.negate());
        Sequent gamma = multiset_minus(left->seq, {c});
        Sequent pi = multiset_minus(right->seq, {c.negate()});
        Sequent target = concat(gamma, pi);
        DerivPtr out;
        switch (c.kind()) {
            case FKind::Lit: {
                if (lastCase.empty()) lastCase = "literal";
                out = ascend_occurrence(left, c, pi, [&](const DerivPtr& ax, int) {
                    // axiom c, ~c, rest: derive ~c, rest, Pi from the right side
                    Sequent rest = multiset_minus(ax->seq, {c, c.negate()});
                    return weaken(right, rest);
                });
                break;
            }
            case FKind::Or: {
                if (lastCase.empty()) lastCase = "boolean";
                Formula a = c.left(), b = c.right();
                DerivPtr l = or_inv(left, c);             // A, B, Gamma
                DerivPtr r1 = and_inv(right, c.negate(), 1);  // ~A, Pi
                DerivPtr r2 = and_inv(right, c.negate(), 2);  // ~B, Pi
                DerivPtr first = cutSum(l, r1, a);        // B, Gamma, Pi
                out = cutSum(first, r2, b);               // Gamma, Pi, Pi
                break;
            }
            default: out = modal(left, right, c); break;
        }
        return contractTo(out, target);
    }

    DerivPtr modal(const DerivPtr& left, const DerivPtr& right, Formula c) {
        // maximal diamond prefix; the first compound program decides the case
        int depth = 0;
        Formula f = c;
        while (f.is_dia() && f.prog().kind() == ProgKind::Atom) {
            f = f.body();
            ++depth;
        }
        if (f.is_dia() && f.prog().kind() == ProgKind::Union) {
            if (lastCase.empty()) lastCase = "union";
            auto sp = strip_prefix(c, depth, false);
            Program p = f.prog();
            Formula cl = add_prefix(sp->progs, false, Formula::dia(p.left(), f.body()));
            Formula cr = add_prefix(sp->progs, false, Formula::dia(p.right(), f.body()));
            DerivPtr l = dia_union_inv(left, c, depth);              // <Q><P>A, <Q><R>A, Gamma
            DerivPtr r1 = box_union_inv(right, c.negate(), 1, depth);  // [Q][P]~A, Pi
            DerivPtr r2 = box_union_inv(right, c.negate(), 2, depth);  // [Q][R]~A, Pi
            DerivPtr first = cutSum(l, r1, cl);  // <Q><R>A, Gamma, Pi
            return cutSum(first, r2, cr);
        }
        if (f.is_dia() && f.prog().kind() == ProgKind::Comp) {
            if (lastCase.empty()) lastCase = "composition";
            auto sp = strip_prefix(c, depth, false);
            Program p = f.prog();
            Formula cc = add_prefix(sp->progs, false, Formula::dia(p.left(), Formula::dia(p.right(), f.body())));
            DerivPtr l = dia_comp_inv(left, c, depth);
            DerivPtr r = box_comp_inv(right, c.negate(), depth);
            // the split formula has the same complexity; reduce it right away
            return reduce(l, r, cc);
        }
        if (lastCase.empty()) lastCase = "modal";
        return prefixCase(left, right, c);
    }

    // C = <q1>...<qn>F with atomic qi and F not a diamond: ascend the left
    // occurrence of C to its principal Gen, then the right occurrence of ~C.
    DerivPtr prefixCase(const DerivPtr& left, const DerivPtr& right, Formula c) {
        Sequent pi = multiset_minus(right->seq, {c.negate()});
        return ascend_occurrence(left, c, pi, [&](const DerivPtr& g1, int idx) {
            if (g1->rule != Rule::Gen) throw std::logic_error("modal cut formula principal in " + rule_name(g1->rule));
            return genGen(g1, idx, right, c);
        });
    }

    // g1 ends in a Gen with C principal; the result derives g1's endsequent
    // with C replaced by the context of `right`.
    DerivPtr genGen(const DerivPtr& g1, int idx, const DerivPtr& right, Formula c) {
        Sequent theta = g1->seq;
        theta.erase(theta.begin() + idx);
        Program q = c.prog();
        const DerivPtr& prem1 = g1->kids[0];
        int k1 = static_cast<int>(std::find(g1->principal.begin(), g1->principal.end(), idx) - g1->principal.begin());
        int box1 = -1;
        for (int k = 0; k < static_cast<int>(g1->principal.size()); ++k)
            if (g1->seq[g1->principal[k]].is_box()) box1 = k;
        Formula inner = prem1->seq[k1];      // C without its first diamond
        Formula boxBody = prem1->seq[box1];  // E of [q]E
        Sequent ctx1;
        for (int i = 0; i < static_cast<int>(g1->seq.size()); ++i)
            if (std::find(g1->principal.begin(), g1->principal.end(), i) == g1->principal.end()) ctx1.push_back(g1->seq[i]);
        return ascend_occurrence(right, c.negate(), theta, [&](const DerivPtr& g2, int idx2) {
            if (g2->rule != Rule::Gen || g2->seq[idx2].prog() != q)
                throw std::logic_error("dual cut formula principal in " + rule_name(g2->rule));
            const DerivPtr& prem2 = g2->kids[0];
            Sequent ctx2;
            for (int i = 0; i < static_cast<int>(g2->seq.size()); ++i)
                if (std::find(g2->principal.begin(), g2->principal.end(), i) == g2->principal.end())
                    ctx2.push_back(g2->seq[i]);
            // premise of g2: ~inner plus its diamond bodies H
            DerivPtr cut = make_cut(prem1, prem2, inner);
            int boxIdx = -1;
            for (int i = 0; i < static_cast<int>(cut->seq.size()); ++i)
                if (cut->seq[i] == boxBody) {
                    boxIdx = i;
                    break;
                }
            DerivPtr gen = make_gen(cut, q, boxIdx, concat(ctx1, ctx2));
            Sequent want = g2->seq;
            want.erase(want.begin() + idx2);
            want = concat(want, theta);
            if (!multiset_equal(gen->seq, want)) throw std::logic_error("genGen: endsequent mismatch");
            return gen;
        });
    }
};

}  // namespace

DerivPtr reduce_cut(const DerivPtr& d) {
    if (d->rule != Rule::Cut) throw ShapeError("reduce_cut: lowermost rule is " + rule_name(d->rule));
    if (!cut_free(d->kids[0]) || !cut_free(d->kids[1])) throw ShapeError("reduce_cut: premises must be cut-free");
    Formula c = d->cut ? *d->cut : infer_node(d->seq, Rule::Cut, d->kids)->cut.value();
    Reducer red;
    DerivPtr out = red.reduce(d->kids[0], d->kids[1], c);
    return contractTo(out, d->seq);
}

namespace {

DerivPtr elim(const DerivPtr& d, EliminationReport* rep) {
    if (cut_free(d)) return d;
    std::vector<DerivPtr> kids;
    for (const auto& k : d->kids) kids.push_back(elim(k, rep));
    if (d->rule != Rule::Cut) return infer_node(d->seq, d->rule, std::move(kids));
    DerivPtr cut = infer_node(d->seq, Rule::Cut, kids, d->cut);
    Formula c = *cut->cut;
    if (c.has_star()) throw ShapeError("cut formula " + render(c) + " contains a star");
    Reducer red;
    DerivPtr reduced = contractTo(red.reduce(kids[0], kids[1], c), d->seq);
    if (rep) {
        ReductionStep st;
        st.cut = c;
        st.reductionCase = red.lastCase;
        st.degBefore = deg(cut);
        st.degAfter = deg(reduced);
        st.h1 = natHeight(kids[0]);
        st.h2 = natHeight(kids[1]);
        st.hOut = natHeight(reduced);
        st.heightBound = ord_sum(nat_sum(st.h1, st.h2), Ordinal::omega());
        st.boundHolds = st.hOut < st.heightBound;
        st.descends = st.degAfter < st.degBefore;
        rep->steps.push_back(st);
    }
    return elim(reduced, rep);
}

}  // namespace

DerivPtr eliminate(const DerivPtr& d, EliminationReport* report) {
    EliminationReport local;
    EliminationReport& rep = report ? *report : local;
    rep = {};
    rep.degIn = deg(d);
    rep.alpha = rep.degIn.is_zero() ? Ordinal{} : succ(leading_degree(rep.degIn));
    rep.alphaParts.clear();
    rep.alphaParts.push_back(rep.alpha);  // w^alpha is a single Cantor term
    rep.hIn = natHeight(d);
    DerivPtr out = elim(d, &rep);
    rep.hOut = natHeight(out);
    rep.bound = veblen(rep.alpha, rep.hIn);
    rep.boundHolds = rep.hOut < rep.bound;
    rep.belowPhiOmega = rep.bound < phi_omega_zero();
    if (!multiset_equal(out->seq, d->seq)) throw std::logic_error("eliminate: endsequent changed");
    return out;
}

nlohmann::json report_to_json(const EliminationReport& r) {
    nlohmann::json j;
    j["deg"] = render(r.degIn);
    j["alpha"] = render(r.alpha);
    j["alpha_cnf"] = nlohmann::json::array();
    for (const auto& a : r.alphaParts) j["alpha_cnf"].push_back(render(a));
    j["height_in"] = render(r.hIn);
    j["height_out"] = render(r.hOut);
    j["bound"] = render(r.bound);
    j["bound_holds"] = r.boundHolds;
    j["bound_below_phi_w_0"] = r.belowPhiOmega;
    j["steps"] = nlohmann::json::array();
    for (const auto& s : r.steps)
        j["steps"].push_back({{"cut", render(s.cut)},
                              {"case", s.reductionCase},
                              {"deg_before", render(s.degBefore)},
                              {"deg_after", render(s.degAfter)},
                              {"h1", render(s.h1)},
                              {"h2", render(s.h2)},
                              {"h_out", render(s.hOut)},
                              {"h_bound", render(s.heightBound)},
                              {"bound_holds", s.boundHolds},
                              {"descends", s.descends}});
    return j;
}

}  // namespace pdl
