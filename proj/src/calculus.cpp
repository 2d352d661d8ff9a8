#include "pdlkit/calculus.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace pdl {

std::string rule_name(Rule r) {
    switch (r) {
        case Rule::Ax: return "Ax";
        case Rule::Or: return "Or";
        case Rule::And: return "And";
        case Rule::DiaUnion: return "DiaUnion";
        case Rule::BoxUnion: return "BoxUnion";
        case Rule::DiaComp: return "DiaComp";
        case Rule::BoxComp: return "BoxComp";
        case Rule::DiaStar: return "DiaStar";
        case Rule::Gen: return "Gen";
        case Rule::Cut: return "Cut";
        case Rule::Weak: return "Weak";
    }
    return "?";
}

Rule rule_from_name(const std::string& s) {
    for (Rule r : {Rule::Ax, Rule::Or, Rule::And, Rule::DiaUnion, Rule::BoxUnion, Rule::DiaComp, Rule::BoxComp,
                   Rule::DiaStar, Rule::Gen, Rule::Cut, Rule::Weak})
        if (rule_name(r) == s) return r;
    throw ShapeError("unknown rule tag '" + s + "'");
}

std::string system_name(System s) {
    switch (s) {
        case System::Seq00: return "seq00";
        case System::Seq0: return "seq0";
        case System::Seq10: return "seq10";
        case System::Seq1: return "seq1";
    }
    return "?";
}
System system_from_name(const std::string& s) {
    for (System x : {System::Seq00, System::Seq0, System::Seq10, System::Seq1})
        if (system_name(x) == s) return x;
    throw ShapeError("unknown system '" + s + "'");
}

// ---- prefixes ----
std::optional<ModalPrefix> strip_prefix(Formula f, int depth, bool boxes) {
    ModalPrefix out;
    for (int i = 0; i < depth; ++i) {
        if (boxes ? !f.is_box() : !f.is_dia()) return std::nullopt;
        out.progs.push_back(f.prog());
        f = f.body();
    }
    out.rest = f;
    return out;
}
Formula add_prefix(const std::vector<Program>& progs, bool boxes, Formula f) {
    for (auto it = progs.rbegin(); it != progs.rend(); ++it) f = Formula::modal(boxes, *it, f);
    return f;
}

namespace {
int maxPrefix(Formula f, bool boxes) {
    int k = 0;
    while (boxes ? f.is_box() : f.is_dia()) {
        ++k;
        f = f.body();
    }
    return k;
}
Formula powerDia(Program p, int m, Formula a) {
    for (int i = 0; i < m; ++i) a = Formula::dia(p, a);
    return a;
}
Sequent without(const Sequent& s, int idx) {
    Sequent out;
    out.reserve(s.size());
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (i != idx) out.push_back(s[i]);
    return out;
}
Sequent maxUnion(const Sequent& a, const Sequent& b) {
    Sequent out = a;
    Sequent extra = multiset_minus(b, a);
    return concat(out, extra);
}
Ordinal labelFor(const std::vector<DerivPtr>& kids) {
    if (kids.empty()) return {};
    Ordinal m;
    for (const auto& k : kids) m = max(m, k->ord);
    return succ(m);
}
}  // namespace

// ---- builders ----
DerivPtr make_node(Sequent seq, Rule rule, std::vector<int> principal, std::vector<DerivPtr> kids,
                   std::optional<Formula> cut, int depth, int starPower) {
    auto d = std::make_shared<Derivation>();
    d->ord = labelFor(kids);
    d->seq = std::move(seq);
    d->rule = rule;
    d->principal = std::move(principal);
    d->kids = std::move(kids);
    d->cut = cut;
    d->depth = depth;
    d->starPower = starPower;
    return d;
}

DerivPtr make_ax(Sequent seq) {
    for (int i = 0; i < static_cast<int>(seq.size()); ++i)
        if (seq[i].is_lit() && seq[i].positive())
            for (int j = 0; j < static_cast<int>(seq.size()); ++j)
                if (seq[j] == seq[i].negate()) return make_node(std::move(seq), Rule::Ax, {i, j}, {});
    throw ShapeError("make_ax: no complementary literal pair in " + render(seq));
}

DerivPtr make_gen(DerivPtr premise, Program p, int boxIndex, const Sequent& ctx) {
    if (premise->seq.empty()) throw ShapeError("Gen needs a nonempty premise");
    Sequent seq;
    std::vector<int> principal;
    for (int i = 0; i < static_cast<int>(premise->seq.size()); ++i) {
        seq.push_back(Formula::modal(i == boxIndex, p, premise->seq[i]));
        principal.push_back(i);
    }
    seq = concat(seq, ctx);
    return make_node(std::move(seq), Rule::Gen, std::move(principal), {std::move(premise)});
}

DerivPtr make_cut(DerivPtr left, DerivPtr right, Formula c, Sequent conclusion) {
    return make_node(std::move(conclusion), Rule::Cut, {}, {std::move(left), std::move(right)}, c);
}
DerivPtr make_cut(DerivPtr left, DerivPtr right, Formula c) {
    Sequent g = multiset_minus(left->seq, {c});
    Sequent p = multiset_minus(right->seq, {c.negate()});
    return make_cut(std::move(left), std::move(right), c, concat(g, p));
}

std::size_t height(const DerivPtr& d) {
    std::size_t h = 0;
    for (const auto& k : d->kids) h = std::max(h, height(k) + 1);
    return h;
}
std::size_t node_count(const DerivPtr& d) {
    std::size_t n = 1;
    for (const auto& k : d->kids) n += node_count(k);
    return n;
}
bool cut_free(const DerivPtr& d) {
    if (d->rule == Rule::Cut) return false;
    return std::all_of(d->kids.begin(), d->kids.end(), [](const DerivPtr& k) { return cut_free(k); });
}
DerivPtr relabel(const DerivPtr& d) {
    std::vector<DerivPtr> kids;
    for (const auto& k : d->kids) kids.push_back(relabel(k));
    auto n = std::make_shared<Derivation>(*d);
    n->kids = std::move(kids);
    n->ord = labelFor(n->kids);
    return n;
}

// ---- JSON ----
nlohmann::json derivation_to_json(const DerivPtr& d) {
    nlohmann::json j;
    j["sequent"] = nlohmann::json::array();
    for (auto f : d->seq) j["sequent"].push_back(render(f));
    j["rule"] = rule_name(d->rule);
    j["principal"] = d->principal;
    j["ord"] = render(d->ord);
    if (d->cut) j["cut"] = render(*d->cut);
    if (d->depth) j["depth"] = d->depth;
    if (d->rule == Rule::DiaStar) j["m"] = d->starPower;
    j["children"] = nlohmann::json::array();
    for (const auto& k : d->kids) j["children"].push_back(derivation_to_json(k));
    return j;
}

DerivPtr derivation_from_json(const nlohmann::json& j) {
    auto d = std::make_shared<Derivation>();
    for (const auto& s : j.at("sequent")) d->seq.push_back(parse_formula(s.get<std::string>()));
    d->rule = rule_from_name(j.at("rule").get<std::string>());
    if (j.contains("principal")) d->principal = j.at("principal").get<std::vector<int>>();
    if (j.contains("children"))
        for (const auto& c : j.at("children")) d->kids.push_back(derivation_from_json(c));
    if (j.contains("ord"))
        d->ord = parse_ordinal(j.at("ord").get<std::string>());
    else
        d->ord = labelFor(d->kids);
    if (j.contains("cut")) d->cut = parse_formula(j.at("cut").get<std::string>());
    if (j.contains("depth")) d->depth = j.at("depth").get<int>();
    if (j.contains("m")) d->starPower = j.at("m").get<int>();
    return d;
}

// ---- local rule inference ----
namespace {

struct LocalOpts {
    bool upgraded = true;
    bool starPrefix = true;  // Seq1 allows a diamond prefix on <*>
    bool atomicOnly = false;  // Gen and <*> over atomic programs
    bool cutOK = true;
    bool starOK = true;
    bool programRules = true;  // <U>, [U], <;>, [;]
};

struct LocalInfo {
    std::vector<int> principal;
    int depth = 0;
    int starPower = 0;
    std::optional<Formula> cut;
};

std::optional<ModalPrefix> decompose(Formula f, int k, bool boxes, ProgKind kind) {
    auto sp = strip_prefix(f, k, boxes);
    if (!sp) return std::nullopt;
    Formula r = sp->rest;
    if (!(boxes ? r.is_box() : r.is_dia()) || r.prog().kind() != kind) return std::nullopt;
    return sp;
}

// New formulas of a decomposition rule applied to f at depth k, per premise.
std::vector<Sequent> newForms(Rule rule, Formula f, int k, int m = 0) {
    bool boxes = rule == Rule::BoxUnion || rule == Rule::BoxComp;
    ProgKind kind = (rule == Rule::DiaUnion || rule == Rule::BoxUnion) ? ProgKind::Union
                    : rule == Rule::DiaStar                           ? ProgKind::Star
                                                                      : ProgKind::Comp;
    auto sp = decompose(f, k, boxes, kind);
    if (!sp) return {};
    Formula r = sp->rest;
    Program p = r.prog();
    Formula a = r.body();
    switch (rule) {
        case Rule::DiaUnion:
            return {{add_prefix(sp->progs, false, Formula::dia(p.left(), a)),
                     add_prefix(sp->progs, false, Formula::dia(p.right(), a))}};
        case Rule::BoxUnion:
            return {{add_prefix(sp->progs, true, Formula::box(p.left(), a))},
                    {add_prefix(sp->progs, true, Formula::box(p.right(), a))}};
        case Rule::DiaComp:
            return {{add_prefix(sp->progs, false, Formula::dia(p.left(), Formula::dia(p.right(), a)))}};
        case Rule::BoxComp:
            return {{add_prefix(sp->progs, true, Formula::box(p.left(), Formula::box(p.right(), a)))}};
        case Rule::DiaStar: return {{add_prefix(sp->progs, false, powerDia(p.body(), m, a))}};
        default: return {};
    }
}

std::optional<std::string> inferLocal(const Derivation& d, const LocalOpts& o, LocalInfo& out) {
    const Sequent& s = d.seq;
    const int n = static_cast<int>(s.size());
    auto arity = [&](std::size_t k) -> std::optional<std::string> {
        if (d.kids.size() != k)
            return rule_name(d.rule) + " expects " + std::to_string(k) + " premise(s), found " +
                   std::to_string(d.kids.size());
        return std::nullopt;
    };
    switch (d.rule) {
        case Rule::Ax: {
            if (auto e = arity(0)) return e;
            for (int i = 0; i < n; ++i)
                if (s[i].is_lit() && s[i].positive())
                    for (int j = 0; j < n; ++j)
                        if (s[j] == s[i].negate()) {
                            out.principal = {i, j};
                            return std::nullopt;
                        }
            return std::string("Ax: no complementary literal pair x, ~x");
        }
        case Rule::Or: {
            if (auto e = arity(1)) return e;
            for (int i = 0; i < n; ++i)
                if (s[i].kind() == FKind::Or &&
                    multiset_equal(concat(without(s, i), {s[i].left(), s[i].right()}), d.kids[0]->seq)) {
                    out.principal = {i};
                    return std::nullopt;
                }
            return std::string("Or: premise is not A, B, Gamma for any A|B in the conclusion");
        }
        case Rule::And: {
            if (auto e = arity(2)) return e;
            for (int i = 0; i < n; ++i)
                if (s[i].kind() == FKind::And &&
                    multiset_equal(concat(without(s, i), {s[i].left()}), d.kids[0]->seq) &&
                    multiset_equal(concat(without(s, i), {s[i].right()}), d.kids[1]->seq)) {
                    out.principal = {i};
                    return std::nullopt;
                }
            return std::string("And: premises are not A, Gamma and B, Gamma");
        }
        case Rule::DiaUnion:
        case Rule::BoxUnion:
        case Rule::DiaComp:
        case Rule::BoxComp: {
            if (!o.programRules) return rule_name(d.rule) + " is not a rule of this system";
            bool two = d.rule == Rule::BoxUnion;
            if (auto e = arity(two ? 2 : 1)) return e;
            bool boxes = d.rule == Rule::BoxUnion || d.rule == Rule::BoxComp;
            for (int i = 0; i < n; ++i) {
                int maxk = o.upgraded ? maxPrefix(s[i], boxes) : 0;
                for (int k = 0; k <= maxk; ++k) {
                    auto nf = newForms(d.rule, s[i], k);
                    if (nf.empty()) continue;
                    bool ok = true;
                    for (std::size_t p = 0; p < nf.size() && ok; ++p)
                        ok = multiset_equal(concat(without(s, i), nf[p]), d.kids[p]->seq);
                    if (ok) {
                        out.principal = {i};
                        out.depth = k;
                        return std::nullopt;
                    }
                }
            }
            return rule_name(d.rule) + ": premise does not match any decomposition of the conclusion" +
                   (o.upgraded ? "" : " (upgraded prefixes disabled)");
        }
        case Rule::DiaStar: {
            if (!o.starOK) return std::string("DiaStar is not a rule of this system");
            if (auto e = arity(1)) return e;
            const Sequent& prem = d.kids[0]->seq;
            if (prem.size() != s.size() + 1 || !multiset_subset(s, prem))
                return std::string("DiaStar: premise must be the conclusion plus one formula");
            Sequent extra = multiset_minus(prem, s);
            Formula e = extra.at(0);
            for (int i = 0; i < n; ++i) {
                int maxk = o.starPrefix ? maxPrefix(s[i], false) : 0;
                for (int k = 0; k <= maxk; ++k) {
                    auto sp = decompose(s[i], k, false, ProgKind::Star);
                    if (!sp) continue;
                    if (o.atomicOnly && sp->rest.prog().body().kind() != ProgKind::Atom) continue;
                    int maxm = static_cast<int>(e.modal_depth());
                    for (int m = 0; m <= maxm; ++m) {
                        auto nf = newForms(Rule::DiaStar, s[i], k, m);
                        if (!nf.empty() && nf[0][0] == e) {
                            out.principal = {i};
                            out.depth = k;
                            out.starPower = m;
                            return std::nullopt;
                        }
                    }
                }
            }
            return std::string("DiaStar: extra premise formula is not <Q><P>^m A for a <Q><P*>A in the conclusion");
        }
        case Rule::Gen: {
            if (auto e = arity(1)) return e;
            const Sequent& prem = d.kids[0]->seq;
            if (prem.empty()) return std::string("Gen: empty premise");
            std::vector<Program> cands;
            for (auto f : s)
                if (f.is_box() && std::find(cands.begin(), cands.end(), f.prog()) == cands.end())
                    cands.push_back(f.prog());
            for (Program p : cands) {
                if (o.atomicOnly && p.kind() != ProgKind::Atom) continue;
                for (int b = 0; b < static_cast<int>(prem.size()); ++b) {
                    std::vector<int> used;
                    bool ok = true;
                    for (int k = 0; k < static_cast<int>(prem.size()) && ok; ++k) {
                        Formula want = Formula::modal(k == b, p, prem[k]);
                        ok = false;
                        for (int i = 0; i < n; ++i)
                            if (s[i] == want && std::find(used.begin(), used.end(), i) == used.end()) {
                                used.push_back(i);
                                ok = true;
                                break;
                            }
                    }
                    if (ok) {
                        out.principal = used;
                        return std::nullopt;
                    }
                }
            }
            return std::string("Gen: conclusion lacks (P)A_1..(P)A_n with exactly one box over the premise");
        }
        case Rule::Cut: {
            if (!o.cutOK) return std::string("Cut is not allowed in this system");
            if (auto e = arity(2)) return e;
            const Sequent& l = d.kids[0]->seq;
            const Sequent& r = d.kids[1]->seq;
            std::vector<Formula> cands;
            if (d.cut)
                cands.push_back(*d.cut);
            else
                cands = l;
            for (Formula c : cands) {
                if (!count_of(l, c) || !count_of(r, c.negate())) continue;
                Sequent g = multiset_minus(l, {c});
                Sequent p = multiset_minus(r, {c.negate()});
                if (multiset_subset(maxUnion(g, p), s) && multiset_subset(s, concat(g, p))) {
                    out.cut = c;
                    return std::nullopt;
                }
            }
            return std::string("Cut: premises are not C, Gamma and ~C, Pi with the conclusion between max-union and sum");
        }
        case Rule::Weak: {
            if (auto e = arity(1)) return e;
            if (!multiset_subset(d.kids[0]->seq, s)) return std::string("Weak: premise is not a sub-multiset");
            return std::nullopt;
        }
    }
    return std::string("unknown rule");
}

LocalOpts optsFor(const SystemSpec& sys) {
    LocalOpts o;
    o.cutOK = sys.cutAllowed;
    o.upgraded = sys.upgradedRules;
    switch (sys.base) {
        case System::Seq00:
            o.atomicOnly = true;
            o.starOK = false;
            o.programRules = false;
            break;
        case System::Seq0: o.starOK = false; break;
        case System::Seq10:
            o.atomicOnly = true;
            o.programRules = false;
            o.starPrefix = false;
            break;
        case System::Seq1: o.starPrefix = true; break;
    }
    return o;
}

Fragment fragmentFor(System s) {
    switch (s) {
        case System::Seq00: return Fragment::L00;
        case System::Seq0: return Fragment::L0;
        case System::Seq10: return Fragment::FOR10;
        case System::Seq1: return Fragment::FOR1;
    }
    return Fragment::L0;
}

const LocalOpts kPermissive{};

// Rebuild a node, re-inferring its principal data; used by transformations.
DerivPtr remake(Sequent seq, Rule rule, std::vector<DerivPtr> kids, std::optional<Formula> cut = std::nullopt) {
    auto d = std::make_shared<Derivation>();
    d->seq = std::move(seq);
    d->rule = rule;
    d->kids = std::move(kids);
    d->cut = cut;
    d->ord = labelFor(d->kids);
    LocalInfo info;
    if (auto err = inferLocal(*d, kPermissive, info))
        throw std::logic_error("transformation produced an invalid " + rule_name(rule) + " node: " + *err +
                               " [" + render(d->seq) + "]");
    d->principal = info.principal;
    d->depth = info.depth;
    d->starPower = info.starPower;
    if (info.cut) d->cut = info.cut;
    return d;
}

}  // namespace

DerivPtr infer_node(Sequent seq, Rule rule, std::vector<DerivPtr> kids, std::optional<Formula> cut) {
    return remake(std::move(seq), rule, std::move(kids), cut);
}

CheckResult check(const SystemSpec& sys, const DerivPtr& root) {
    LocalOpts o = optsFor(sys);
    Fragment fr = fragmentFor(sys.base);
    std::vector<DerivPtr> stack{root};
    while (!stack.empty()) {
        DerivPtr d = stack.back();
        stack.pop_back();
        auto bad = [&](const std::string& why) { return CheckResult{false, why + " at [" + render(d->seq) + "]", d}; };
        for (auto f : d->seq)
            if (!in_fragment(f, fr)) return bad("formula " + render(f) + " outside the fragment of " + system_name(sys.base));
        LocalInfo info;
        if (auto err = inferLocal(*d, o, info)) return bad(*err);
        for (const auto& k : d->kids) {
            if (!(k->ord < d->ord))
                return bad("premise label " + render(k->ord) + " not below conclusion label " + render(d->ord));
            stack.push_back(k);
        }
    }
    return {};
}

DerivPtr annotate(const SystemSpec& sys, const DerivPtr& d) {
    LocalOpts o = optsFor(sys);
    std::vector<DerivPtr> kids;
    for (const auto& k : d->kids) kids.push_back(annotate(sys, k));
    auto n = std::make_shared<Derivation>(*d);
    n->kids = std::move(kids);
    LocalInfo info;
    if (auto err = inferLocal(*n, o, info)) throw ShapeError(*err + " at [" + render(n->seq) + "]");
    n->principal = info.principal;
    n->depth = info.depth;
    n->starPower = info.starPower;
    if (info.cut) n->cut = info.cut;
    return n;
}

// ---- extended axiom ----
DerivPtr extended_axiom(Formula f, const Sequent& ctx) {
    if (f.has_star()) throw ShapeError("extended_axiom: " + render(f) + " needs the [*] rule for its dual");
    Formula g = f.negate();
    switch (f.kind()) {
        case FKind::Lit: return make_ax(concat({f, g}, ctx));
        case FKind::Or:
        case FKind::And: {
            // D = A|B carries the Or step, E = ~A&~B the And step
            Formula disj = f.kind() == FKind::Or ? f : g;
            Formula conj = f.kind() == FKind::Or ? g : f;
            Formula a = disj.left(), b = disj.right();
            auto l = extended_axiom(a, concat({b}, ctx));  // A, ~A, B, ctx
            auto r = extended_axiom(b, concat({a}, ctx));  // B, ~B, A, ctx
            Sequent andConcl = concat({a, b, conj}, ctx);
            auto andNode = remake(andConcl, Rule::And, {l, r});
            return remake(concat({f, g}, ctx), Rule::Or, {andNode});
        }
        case FKind::Box:
        case FKind::Dia: {
            Formula box = f.is_box() ? f : g;
            auto inner = extended_axiom(box.body(), {});  // B, ~B
            auto gen = make_gen(inner, box.prog(), 0, ctx);
            // order the conclusion as f, ~f, ctx
            Sequent seq = concat({f, g}, ctx);
            return remake(seq, Rule::Gen, {gen->kids[0]});
        }
    }
    throw std::logic_error("extended_axiom: unreachable");
}

// ---- transformations ----
std::string transform_name(Transform t) {
    switch (t) {
        case Transform::W: return "W";
        case Transform::C: return "C";
        case Transform::OrInv: return "OrInv";
        case Transform::AndInv1: return "AndInv1";
        case Transform::AndInv2: return "AndInv2";
        case Transform::DiaUnionInv: return "DiaUnionInv";
        case Transform::BoxUnionInv1: return "BoxUnionInv1";
        case Transform::BoxUnionInv2: return "BoxUnionInv2";
        case Transform::DiaCompInv: return "DiaCompInv";
        case Transform::BoxCompInv: return "BoxCompInv";
        case Transform::GenVec: return "GenVec";
    }
    return "?";
}
Transform transform_from_name(const std::string& s) {
    for (Transform t : {Transform::W, Transform::C, Transform::OrInv, Transform::AndInv1, Transform::AndInv2,
                        Transform::DiaUnionInv, Transform::BoxUnionInv1, Transform::BoxUnionInv2,
                        Transform::DiaCompInv, Transform::BoxCompInv, Transform::GenVec})
        if (transform_name(t) == s) return t;
    throw ShapeError("unknown transform '" + s + "'");
}

namespace {

bool isPrincipalAt(const Derivation& d, int idx) {
    return std::find(d.principal.begin(), d.principal.end(), idx) != d.principal.end();
}
int nonPrincipalIndex(const Derivation& d, Formula f) {
    for (int i = 0; i < static_cast<int>(d.seq.size()); ++i)
        if (d.seq[i] == f && !isPrincipalAt(d, i)) return i;
    return -1;
}
int indexOf(const Sequent& s, Formula f) {
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (s[i] == f) return i;
    return -1;
}
Sequent replaceAt(const Sequent& s, int idx, const Sequent& repl) { return concat(without(s, idx), repl); }

using Handler = PrincipalHandler;

DerivPtr ascend(const DerivPtr& d, Formula target, const Sequent& repl, const Handler& onPrincipal);

// Cut contexts: replace in whichever premise keeps the conclusion between
// the max-union and the sum of the new contexts.
DerivPtr ascendCut(const DerivPtr& d, Formula target, const Sequent& repl, const Handler& onPrincipal) {
    Formula c = *d->cut;
    Sequent g = multiset_minus(d->kids[0]->seq, {c});
    Sequent p = multiset_minus(d->kids[1]->seq, {c.negate()});
    std::size_t cd = count_of(d->seq, target), cg = count_of(g, target), cp = count_of(p, target);
    bool left = cg >= 1 && cp < cd, right = !left && cp >= 1 && cg < cd;
    bool both = !left && !right;
    DerivPtr l = d->kids[0], r = d->kids[1];
    if (left || both) l = ascend(l, target, repl, onPrincipal);
    if (right || both) r = ascend(r, target, repl, onPrincipal);
    int idx = indexOf(d->seq, target);
    return remake(replaceAt(d->seq, idx, repl), Rule::Cut, {l, r}, c);
}

// Replace one occurrence of `target` by `repl` throughout the derivation,
// delegating to `onPrincipal` where every occurrence is principal.
DerivPtr ascend(const DerivPtr& d, Formula target, const Sequent& repl, const Handler& onPrincipal) {
    int idx = nonPrincipalIndex(*d, target);
    if (idx < 0) {
        int p = indexOf(d->seq, target);
        if (p < 0) throw ShapeError("target " + render(target) + " absent from [" + render(d->seq) + "]");
        return onPrincipal(d, p);
    }
    Sequent seq = replaceAt(d->seq, idx, repl);
    switch (d->rule) {
        case Rule::Ax:
        case Rule::Gen: return remake(std::move(seq), d->rule, d->kids);
        case Rule::Cut: return ascendCut(d, target, repl, onPrincipal);
        case Rule::Weak: {
            DerivPtr k = d->kids[0];
            if (count_of(k->seq, target)) k = ascend(k, target, repl, onPrincipal);
            return remake(std::move(seq), Rule::Weak, {k});
        }
        default: {
            std::vector<DerivPtr> kids;
            for (const auto& k : d->kids) kids.push_back(ascend(k, target, repl, onPrincipal));
            return remake(std::move(seq), d->rule, std::move(kids));
        }
    }
}

enum class MKind { DiaUnion, BoxUnion1, BoxUnion2, DiaComp, BoxComp };
struct MTarget {
    Formula f;
    int depth;
    MKind kind;
};
bool boxKind(MKind k) { return k == MKind::BoxUnion1 || k == MKind::BoxUnion2 || k == MKind::BoxComp; }
ProgKind progKind(MKind k) { return (k == MKind::DiaComp || k == MKind::BoxComp) ? ProgKind::Comp : ProgKind::Union; }
Rule ruleOf(MKind k) {
    switch (k) {
        case MKind::DiaUnion: return Rule::DiaUnion;
        case MKind::BoxUnion1:
        case MKind::BoxUnion2: return Rule::BoxUnion;
        case MKind::DiaComp: return Rule::DiaComp;
        case MKind::BoxComp: return Rule::BoxComp;
    }
    return Rule::Ax;
}

MTarget resolve(Formula f, int depth, MKind kind) {
    bool boxes = boxKind(kind);
    if (depth >= 0) {
        if (!decompose(f, depth, boxes, progKind(kind)))
            throw ShapeError("target " + render(f) + " has no matching program at depth " + std::to_string(depth));
        return {f, depth, kind};
    }
    for (int k = 0; k <= maxPrefix(f, boxes); ++k)
        if (decompose(f, k, boxes, progKind(kind))) return {f, k, kind};
    throw ShapeError("target " + render(f) + " has the wrong shape for this inversion");
}

Sequent mresult(const MTarget& t) {
    auto sp = decompose(t.f, t.depth, boxKind(t.kind), progKind(t.kind));
    Formula r = sp->rest;
    Program p = r.prog();
    Formula a = r.body();
    const auto& pre = sp->progs;
    switch (t.kind) {
        case MKind::DiaUnion:
            return {add_prefix(pre, false, Formula::dia(p.left(), a)), add_prefix(pre, false, Formula::dia(p.right(), a))};
        case MKind::BoxUnion1: return {add_prefix(pre, true, Formula::box(p.left(), a))};
        case MKind::BoxUnion2: return {add_prefix(pre, true, Formula::box(p.right(), a))};
        case MKind::DiaComp: return {add_prefix(pre, false, Formula::dia(p.left(), Formula::dia(p.right(), a)))};
        case MKind::BoxComp: return {add_prefix(pre, true, Formula::box(p.left(), Formula::box(p.right(), a)))};
    }
    return {};
}

DerivPtr minv(const DerivPtr& d, const MTarget& t);

// Apply a unary decomposition rule to obtain `r` from its new formulas.
DerivPtr applyUnary(const DerivPtr& cur, Rule rule, Formula r, int depth, int m) {
    auto nf = newForms(rule, r, depth, m);
    if (nf.empty()) throw std::logic_error("applyUnary: shape mismatch for " + render(r));
    Sequent seq = multiset_minus(cur->seq, nf[0]);
    if (rule != Rule::DiaStar) seq.push_back(r);
    return remake(std::move(seq), rule, {cur});
}

// Gen-principal crucial cases at depth 0.
DerivPtr genCrucial(const DerivPtr& d, int, const MTarget& t) {
    const DerivPtr& prem = d->kids[0];
    const Sequent& ps = prem->seq;
    int kBox = -1;
    for (int k = 0; k < static_cast<int>(d->principal.size()); ++k) {
        if (d->seq[d->principal[k]].is_box()) kBox = k;
    }
    Sequent ctx;
    for (int i = 0; i < static_cast<int>(d->seq.size()); ++i)
        if (!isPrincipalAt(*d, i)) ctx.push_back(d->seq[i]);
    Program P = t.f.prog();
    Program L = P.left(), R = P.right();
    Formula C = ps[kBox];
    Sequent diaBodies;  // all diamond bodies including the target's
    for (int k = 0; k < static_cast<int>(ps.size()); ++k)
        if (k != kBox) diaBodies.push_back(ps[k]);

    if (t.kind == MKind::DiaUnion || t.kind == MKind::BoxUnion1 || t.kind == MKind::BoxUnion2) {
        Formula targetBody = t.f.body();
        auto branch = [&](Program mine, Program other, bool keepTargetSplit) {
            Sequent extra;
            for (auto b : diaBodies) extra.push_back(Formula::dia(other, b));
            DerivPtr cur = make_gen(prem, mine, kBox, concat(extra, ctx));
            // recombine every diamond except (for <U>) the target itself
            Sequent todo = diaBodies;
            if (keepTargetSplit) todo = multiset_minus(todo, {targetBody});
            for (auto b : todo) cur = applyUnary(cur, Rule::DiaUnion, Formula::dia(P, b), 0, 0);
            return cur;
        };
        if (t.kind == MKind::DiaUnion) {
            DerivPtr left = branch(L, R, true);
            DerivPtr right = branch(R, L, true);
            Sequent seq = multiset_minus(left->seq, {Formula::box(L, C)});
            seq.push_back(Formula::box(P, C));
            return remake(std::move(seq), Rule::BoxUnion, {left, right});
        }
        return branch(t.kind == MKind::BoxUnion1 ? L : R, t.kind == MKind::BoxUnion1 ? R : L, false);
    }
    // composition: Gen_R then Gen_P, then recombine
    DerivPtr inner = make_gen(prem, R, kBox, {});
    DerivPtr cur = make_gen(inner, L, kBox, ctx);
    Sequent todo = diaBodies;
    if (t.kind == MKind::DiaComp) todo = multiset_minus(todo, {t.f.body()});
    for (auto b : todo) cur = applyUnary(cur, Rule::DiaComp, Formula::dia(P, b), 0, 0);
    if (t.kind == MKind::DiaComp) cur = applyUnary(cur, Rule::BoxComp, Formula::box(P, C), 0, 0);
    return cur;
}

DerivPtr minvPrincipal(const DerivPtr& d, int idx, const MTarget& t) {
    switch (d->rule) {
        case Rule::Gen: {
            if (t.depth == 0) return genCrucial(d, idx, t);
            const DerivPtr& prem = d->kids[0];
            int k = static_cast<int>(std::find(d->principal.begin(), d->principal.end(), idx) - d->principal.begin());
            int kBox = -1;
            for (int j = 0; j < static_cast<int>(d->principal.size()); ++j)
                if (d->seq[d->principal[j]].is_box()) kBox = j;
            MTarget inner{prem->seq[k], t.depth - 1, t.kind};
            Sequent innerRes = mresult(inner);
            DerivPtr np = minv(prem, inner);
            Formula boxBody = k == kBox ? innerRes[0] : prem->seq[kBox];
            Sequent ctx;
            for (int i = 0; i < static_cast<int>(d->seq.size()); ++i)
                if (!isPrincipalAt(*d, i)) ctx.push_back(d->seq[i]);
            return make_gen(np, t.f.prog(), indexOf(np->seq, boxBody), ctx);
        }
        case Rule::DiaUnion:
        case Rule::BoxUnion:
        case Rule::DiaComp:
        case Rule::BoxComp:
        case Rule::DiaStar: {
            int dd = d->depth;
            if (d->rule == ruleOf(t.kind) && dd == t.depth) {
                if (t.kind == MKind::BoxUnion2) return d->kids[1];
                return d->kids[0];
            }
            // Commute: invert the rule's new formulas, then re-apply the rule.
            bool compTarget = t.kind == MKind::DiaComp || t.kind == MKind::BoxComp;
            int m = d->starPower;
            auto nf = newForms(d->rule, d->seq[idx], dd, m);
            std::vector<DerivPtr> kids;
            for (std::size_t p = 0; p < d->kids.size(); ++p) {
                DerivPtr cur = d->kids[p];
                std::vector<std::pair<Formula, int>> descs;
                for (auto f : nf[p]) {
                    int depth = t.depth;
                    if (t.depth > dd) {
                        if (d->rule == Rule::DiaComp || d->rule == Rule::BoxComp) depth = t.depth + 1;
                        if (d->rule == Rule::DiaStar) depth = t.depth + m - 1;
                    }
                    descs.emplace_back(f, depth);
                }
                if (d->rule == Rule::DiaStar) descs.emplace_back(d->seq[idx], t.depth);  // kept copy
                for (auto [f, depth] : descs) cur = minv(cur, MTarget{f, depth, t.kind});
                kids.push_back(cur);
            }
            int newDepth = (t.depth < dd && compTarget) ? dd + 1 : dd;
            Sequent res = mresult(t);
            if (d->rule == Rule::BoxUnion) {
                Formula r = res.at(0);
                auto rf = newForms(Rule::BoxUnion, r, newDepth);
                Sequent seq = multiset_minus(kids[0]->seq, rf[0]);
                seq.push_back(r);
                return remake(std::move(seq), Rule::BoxUnion, kids);
            }
            DerivPtr cur = kids[0];
            for (auto r : res) cur = applyUnary(cur, d->rule, r, newDepth, m);
            return cur;
        }
        default: throw std::logic_error("modal inversion: unexpected principal " + rule_name(d->rule));
    }
}

DerivPtr minv(const DerivPtr& d, const MTarget& t) {
    return ascend(d, t.f, mresult(t), [&](const DerivPtr& n, int idx) { return minvPrincipal(n, idx, t); });
}

}  // namespace

DerivPtr ascend_occurrence(const DerivPtr& d, Formula target, const Sequent& repl, const PrincipalHandler& onPrincipal) {
    return ascend(d, target, repl, onPrincipal);
}

DerivPtr weaken(const DerivPtr& d, const Sequent& extra) {
    if (extra.empty()) return d;
    auto n = std::make_shared<Derivation>(*d);
    n->seq = concat(d->seq, extra);
    switch (d->rule) {
        case Rule::Ax:
        case Rule::Gen:
        case Rule::Weak: break;
        case Rule::Cut: n->kids = {weaken(d->kids[0], extra), d->kids[1]}; break;
        default: {
            n->kids.clear();
            for (const auto& k : d->kids) n->kids.push_back(weaken(k, extra));
        }
    }
    n->ord = labelFor(n->kids);
    return n;
}

DerivPtr or_inv(const DerivPtr& d, Formula target) {
    if (target.kind() != FKind::Or) throw ShapeError("OrInv: target " + render(target) + " is not a disjunction");
    return ascend(d, target, {target.left(), target.right()}, [](const DerivPtr& n, int) {
        if (n->rule != Rule::Or) throw std::logic_error("OrInv: disjunction principal in " + rule_name(n->rule));
        return n->kids[0];
    });
}

DerivPtr and_inv(const DerivPtr& d, Formula target, int side) {
    if (target.kind() != FKind::And) throw ShapeError("AndInv: target " + render(target) + " is not a conjunction");
    Formula part = side == 1 ? target.left() : target.right();
    return ascend(d, target, {part}, [side](const DerivPtr& n, int) {
        if (n->rule != Rule::And) throw std::logic_error("AndInv: conjunction principal in " + rule_name(n->rule));
        return n->kids[side - 1];
    });
}

DerivPtr dia_union_inv(const DerivPtr& d, Formula target, int depth) {
    return minv(d, resolve(target, depth, MKind::DiaUnion));
}
DerivPtr box_union_inv(const DerivPtr& d, Formula target, int side, int depth) {
    return minv(d, resolve(target, depth, side == 1 ? MKind::BoxUnion1 : MKind::BoxUnion2));
}
DerivPtr dia_comp_inv(const DerivPtr& d, Formula target, int depth) {
    return minv(d, resolve(target, depth, MKind::DiaComp));
}
DerivPtr box_comp_inv(const DerivPtr& d, Formula target, int depth) {
    return minv(d, resolve(target, depth, MKind::BoxComp));
}

DerivPtr contract(const DerivPtr& d, Formula a) {
    if (count_of(d->seq, a) < 2) throw ShapeError("C: " + render(a) + " does not occur twice in [" + render(d->seq) + "]");
    int np = 0;
    for (int i = 0; i < static_cast<int>(d->seq.size()); ++i)
        if (d->seq[i] == a && !isPrincipalAt(*d, i)) ++np;
    Sequent seq = multiset_minus(d->seq, {a});
    switch (d->rule) {
        case Rule::Ax: return remake(std::move(seq), Rule::Ax, {});
        case Rule::Gen:
            if (np >= 1) return remake(std::move(seq), Rule::Gen, d->kids);
            return remake(std::move(seq), Rule::Gen, {contract(d->kids[0], a.body())});
        case Rule::Weak: {
            DerivPtr k = d->kids[0];
            if (count_of(k->seq, a) >= 2) k = contract(k, a);
            return remake(std::move(seq), Rule::Weak, {k});
        }
        case Rule::Cut: {
            Formula c = *d->cut;
            Sequent g = multiset_minus(d->kids[0]->seq, {c});
            Sequent p = multiset_minus(d->kids[1]->seq, {c.negate()});
            std::size_t cd = count_of(d->seq, a);
            DerivPtr l = d->kids[0], r = d->kids[1];
            if (count_of(g, a) == cd) l = contract(l, a);
            if (count_of(p, a) == cd) r = contract(r, a);
            return remake(std::move(seq), Rule::Cut, {l, r}, c);
        }
        default: break;
    }
    if (np >= 2 || d->rule == Rule::DiaStar) {
        std::vector<DerivPtr> kids;
        for (const auto& k : d->kids) kids.push_back(contract(k, a));
        return remake(std::move(seq), d->rule, std::move(kids));
    }
    // one principal copy, one context copy: invert the context copy above
    auto contractAll = [](DerivPtr k, const Sequent& parts) {
        for (auto f : parts) k = contract(k, f);
        return k;
    };
    std::vector<DerivPtr> kids;
    switch (d->rule) {
        case Rule::Or: kids = {contractAll(or_inv(d->kids[0], a), {a.left(), a.right()})}; break;
        case Rule::And:
            kids = {contractAll(and_inv(d->kids[0], a, 1), {a.left()}), contractAll(and_inv(d->kids[1], a, 2), {a.right()})};
            break;
        case Rule::DiaUnion: {
            MTarget t{a, d->depth, MKind::DiaUnion};
            kids = {contractAll(minv(d->kids[0], t), mresult(t))};
            break;
        }
        case Rule::BoxUnion: {
            MTarget t1{a, d->depth, MKind::BoxUnion1}, t2{a, d->depth, MKind::BoxUnion2};
            kids = {contractAll(minv(d->kids[0], t1), mresult(t1)), contractAll(minv(d->kids[1], t2), mresult(t2))};
            break;
        }
        case Rule::DiaComp:
        case Rule::BoxComp: {
            MTarget t{a, d->depth, d->rule == Rule::DiaComp ? MKind::DiaComp : MKind::BoxComp};
            kids = {contractAll(minv(d->kids[0], t), mresult(t))};
            break;
        }
        default: throw std::logic_error("C: unexpected rule");
    }
    return remake(std::move(seq), d->rule, std::move(kids));
}

DerivPtr gen_vec(const DerivPtr& d, const std::vector<Program>& progs, const std::vector<std::vector<int>>& cols,
                 const Sequent& ctx) {
    if (progs.empty() || progs.size() != cols.size()) throw ShapeError("GenVec: need one column per program");
    DerivPtr cur = d;
    for (int j = static_cast<int>(progs.size()) - 1; j >= 0; --j) {
        const auto& col = cols[j];
        if (col.size() != d->seq.size() || std::count(col.begin(), col.end(), 1) != 1)
            throw ShapeError("GenVec: each column must mark exactly one premise formula");
        int box = static_cast<int>(std::find(col.begin(), col.end(), 1) - col.begin());
        cur = make_gen(cur, progs[j], box, j == 0 ? ctx : Sequent{});
    }
    return cur;
}

DerivPtr apply_transform(Transform t, const DerivPtr& d, const TransformArgs& a) {
    auto need = [&]() {
        if (!a.target) throw ShapeError(transform_name(t) + " needs a target formula");
        return *a.target;
    };
    switch (t) {
        case Transform::W: return weaken(d, a.extra);
        case Transform::C: return contract(d, need());
        case Transform::OrInv: return or_inv(d, need());
        case Transform::AndInv1: return and_inv(d, need(), 1);
        case Transform::AndInv2: return and_inv(d, need(), 2);
        case Transform::DiaUnionInv: return dia_union_inv(d, need(), a.depth);
        case Transform::BoxUnionInv1: return box_union_inv(d, need(), 1, a.depth);
        case Transform::BoxUnionInv2: return box_union_inv(d, need(), 2, a.depth);
        case Transform::DiaCompInv: return dia_comp_inv(d, need(), a.depth);
        case Transform::BoxCompInv: return box_comp_inv(d, need(), a.depth);
        case Transform::GenVec: return gen_vec(d, a.progs, a.columns, a.extra);
    }
    throw std::logic_error("apply_transform: unreachable");
}

// ---- p-inversion ----
namespace {
bool mentions(Formula f, Program p) {
    switch (f.kind()) {
        case FKind::Lit: return false;
        case FKind::Or:
        case FKind::And: return mentions(f.left(), p) || mentions(f.right(), p);
        default: return f.prog() == p || mentions(f.body(), p);
    }
}
bool pFormula(Formula f, Program p) { return f.is_modal() && f.prog() == p; }

PInvResult pinv(const DerivPtr& d, Program p, const Sequent& boxes) {
    Sequent side, dias;
    for (auto f : d->seq) {
        if (pFormula(f, p))
            (f.is_dia() ? dias : side).push_back(f);  // boxes handled below
        else
            side.push_back(f);
    }
    side.erase(std::remove_if(side.begin(), side.end(), [&](Formula f) { return pFormula(f, p); }), side.end());
    Sequent diaBodies;
    for (auto f : dias) diaBodies.push_back(f.body());
    switch (d->rule) {
        case Rule::Ax: return {true, -1, make_ax(side)};
        case Rule::Gen: {
            Formula anyPrincipal = d->seq[d->principal.at(0)];
            if (anyPrincipal.prog() != p) return {true, -1, remake(side, Rule::Gen, d->kids)};
            int kBox = -1;
            for (int k = 0; k < static_cast<int>(d->principal.size()); ++k)
                if (d->seq[d->principal[k]].is_box()) kBox = k;
            Formula boxF = d->seq[d->principal[kBox]];
            int i = indexOf(boxes, boxF);
            // premise: A_i plus a sub-multiset of the diamond bodies
            Sequent missing = multiset_minus(diaBodies, multiset_minus(d->kids[0]->seq, {boxF.body()}));
            return {false, i, weaken(d->kids[0], missing)};
        }
        case Rule::Or: {
            auto r = pinv(d->kids[0], p, boxes);
            if (!r.side) return r;
            return {true, -1, remake(side, Rule::Or, {r.deriv})};
        }
        case Rule::And: {
            auto l = pinv(d->kids[0], p, boxes);
            if (!l.side) return l;
            auto r = pinv(d->kids[1], p, boxes);
            if (!r.side) return r;
            return {true, -1, remake(side, Rule::And, {l.deriv, r.deriv})};
        }
        case Rule::Weak: {
            auto r = pinv(d->kids[0], p, boxes);
            if (!r.side) {
                Formula boxF = boxes[r.boxIndex];
                Sequent want = concat({boxF.body()}, diaBodies);
                return {false, r.boxIndex, weaken(r.deriv, multiset_minus(want, r.deriv->seq))};
            }
            return {true, -1, weaken(r.deriv, multiset_minus(side, r.deriv->seq))};
        }
        default: throw ShapeError("p_invert: rule " + rule_name(d->rule) + " is outside Seq00");
    }
}
}  // namespace

PInvResult p_invert(const DerivPtr& d, Program p) {
    if (p.kind() != ProgKind::Atom) throw ShapeError("p_invert: program must be atomic");
    Sequent boxes;
    for (auto f : d->seq) {
        if (pFormula(f, p)) {
            if (mentions(f.body(), p) && false) continue;
            if (f.is_box()) boxes.push_back(f);
        } else if (mentions(f, p)) {
            throw ShapeError("p_invert: side formula " + render(f) + " mentions " + render(p));
        }
    }
    if (!cut_free(d)) throw ShapeError("p_invert: derivation must be cut-free");
    PInvResult r = pinv(d, p, boxes);
    return r;
}

}  // namespace pdl
