#include "pdlkit/prover.hpp"

#include <algorithm>
#include <map>

namespace pdl {

std::string search_kind_name(SearchKind k) {
    switch (k) {
        case SearchKind::AxLeaf: return "ax";
        case SearchKind::FailLeaf: return "fail";
        case SearchKind::OrStep: return "or";
        case SearchKind::AndStep: return "and";
        case SearchKind::GenStep: return "gen";
        case SearchKind::WeakStep: return "weak";
        case SearchKind::Choice: return "choice";
    }
    return "?";
}

namespace {

void requireFragment(const Sequent& s, Fragment fr) {
    for (auto f : s)
        if (!in_fragment(f, fr))
            throw ShapeError("prover input outside " + fragment_name(fr) + ": " + render(f));
}
void requireL00(const Sequent& s) { requireFragment(s, Fragment::L00); }

int firstCompound(const Sequent& s) {
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (s[i].is_modal() && s[i].prog().kind() != ProgKind::Atom) return i;
    return -1;
}

bool isAxiom(const Sequent& s) {
    for (auto f : s)
        if (f.is_lit() && f.positive() && count_of(s, f.negate())) return true;
    return false;
}

int firstOf(const Sequent& s, FKind k) {
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (s[i].kind() == k) return i;
    return -1;
}
int firstBox(const Sequent& s) { return firstOf(s, FKind::Box); }

Sequent drop(const Sequent& s, int idx) {
    Sequent out;
    for (int i = 0; i < static_cast<int>(s.size()); ++i)
        if (i != idx) out.push_back(s[i]);
    return out;
}

// Gen premise for box idx: its body, then the bodies of same-program diamonds.
Sequent genPremise(const Sequent& s, int idx) {
    Program p = s[idx].prog();
    Sequent out{s[idx].body()};
    for (auto f : s)
        if (f.is_dia() && f.prog() == p) out.push_back(f.body());
    return out;
}

DerivPtr genNode(const Sequent& concl, DerivPtr premise) { return infer_node(concl, Rule::Gen, {std::move(premise)}); }

std::vector<std::uint64_t> memoKey(const Sequent& s) {
    std::vector<std::uint64_t> k;
    k.reserve(s.size());
    for (auto f : s) k.push_back(f.id());
    std::sort(k.begin(), k.end());
    return k;
}

class Searcher {
public:
    bool useMemo = false;
    std::map<std::vector<std::uint64_t>, DerivPtr> memo;
    ProveStats stats;
    std::vector<TraceStep> path;  // current path while searching
    std::vector<TraceStep> failPath;

    // Modal chain: boxes dropped by earlier weak steps live in `concl` but
    // are absent from `cur`.
    DerivPtr run(const Sequent& s, std::size_t depth) {
        std::vector<std::uint64_t> key;
        if (useMemo) {
            key = memoKey(s);
            if (auto it = memo.find(key); it != memo.end()) return it->second;
        }
        enter(s, depth);
        DerivPtr out = step(s, depth);
        leave();
        if (useMemo) memo.emplace(std::move(key), out);
        return out;
    }

private:
    void enter(const Sequent& s, std::size_t depth) {
        ++stats.nodes;
        stats.peakPath = std::max(stats.peakPath, depth + 1);
        stats.peakSequent = std::max(stats.peakSequent, s.size());
        path.push_back({s, ""});
    }
    void leave() { path.pop_back(); }
    void fail() {
        path.back().step = "fail";
        if (failPath.empty()) failPath = path;
    }

    DerivPtr step(const Sequent& s, std::size_t depth) {
        if (isAxiom(s)) return make_ax(s);
        if (int i = firstOf(s, FKind::Or); i >= 0) {
            path.back().step = "or";
            Sequent prem = concat(drop(s, i), {s[i].left(), s[i].right()});
            DerivPtr k = run(prem, depth + 1);
            if (!k) return nullptr;
            return make_node(s, Rule::Or, {i}, {k});
        }
        if (int i = firstOf(s, FKind::And); i >= 0) {
            Sequent rest = drop(s, i);
            path.back().step = "and1";
            DerivPtr l = run(concat(rest, {s[i].left()}), depth + 1);
            if (!l) return nullptr;
            path.back().step = "and2";
            DerivPtr r = run(concat(rest, {s[i].right()}), depth + 1);
            if (!r) return nullptr;
            return make_node(s, Rule::And, {i}, {l, r});
        }
        if (int i = firstCompound(s); i >= 0) return program(s, i, depth);
        // purely modal: try boxes in order; dropping a box is the weak branch
        return modal(s, s, depth);
    }

    DerivPtr program(const Sequent& s, int i, std::size_t depth) {
        Formula f = s[i];
        Program p = f.prog();
        Formula a = f.body();
        Sequent rest = drop(s, i);
        bool isUnion = p.kind() == ProgKind::Union;
        if (f.is_box() && isUnion) {
            path.back().step = "and1";
            DerivPtr l = run(concat(rest, {Formula::box(p.left(), a)}), depth + 1);
            if (!l) return nullptr;
            path.back().step = "and2";
            DerivPtr r = run(concat(rest, {Formula::box(p.right(), a)}), depth + 1);
            if (!r) return nullptr;
            return make_node(s, Rule::BoxUnion, {i}, {l, r});
        }
        Sequent added;
        Rule rule;
        if (isUnion) {
            added = {Formula::dia(p.left(), a), Formula::dia(p.right(), a)};
            rule = Rule::DiaUnion;
        } else {
            added = {Formula::modal(f.is_box(), p.left(), Formula::modal(f.is_box(), p.right(), a))};
            rule = f.is_box() ? Rule::BoxComp : Rule::DiaComp;
        }
        path.back().step = "or";
        DerivPtr k = run(concat(rest, added), depth + 1);
        if (!k) return nullptr;
        return make_node(s, rule, {i}, {k});
    }

    DerivPtr modal(const Sequent& concl, const Sequent& cur, std::size_t depth) {
        int j = firstBox(cur);
        if (j < 0) {
            fail();
            return nullptr;
        }
        path.back().step = "gen";
        DerivPtr prem = run(genPremise(cur, j), depth + 1);
        if (prem) return genNode(concl, prem);
        Sequent rest = drop(cur, j);
        if (firstBox(rest) < 0) {
            fail();
            return nullptr;
        }
        path.back().step = "weak";
        path.push_back({rest, ""});
        stats.peakPath = std::max(stats.peakPath, depth + 2);
        ++stats.nodes;
        DerivPtr out = modal(concl, rest, depth + 1);
        path.pop_back();
        return out;
    }
};

SearchTree buildTree(const Sequent& s) {
    SearchTree t;
    t.seq = s;
    if (isAxiom(s)) {
        t.kind = SearchKind::AxLeaf;
        return t;
    }
    if (int i = firstOf(s, FKind::Or); i >= 0) {
        t.kind = SearchKind::OrStep;
        t.kids.push_back(buildTree(concat(drop(s, i), {s[i].left(), s[i].right()})));
        return t;
    }
    if (int i = firstOf(s, FKind::And); i >= 0) {
        t.kind = SearchKind::AndStep;
        Sequent rest = drop(s, i);
        t.kids.push_back(buildTree(concat(rest, {s[i].left()})));
        t.kids.push_back(buildTree(concat(rest, {s[i].right()})));
        return t;
    }
    int j = firstBox(s);
    if (j < 0) {
        t.kind = SearchKind::FailLeaf;
        return t;
    }
    Sequent rest = drop(s, j);
    SearchTree gen;
    gen.seq = s;
    gen.kind = SearchKind::GenStep;
    gen.choice = j;
    gen.kids.push_back(buildTree(genPremise(s, j)));
    if (firstBox(rest) < 0) return gen;  // single box: identity gate
    t.kind = SearchKind::Choice;
    t.choice = j;
    SearchTree weak;
    weak.seq = s;
    weak.kind = SearchKind::WeakStep;
    weak.choice = j;
    weak.kids.push_back(buildTree(rest));
    t.kids.push_back(std::move(gen));
    t.kids.push_back(std::move(weak));
    return t;
}

}  // namespace

std::size_t search_depth_bound(const Sequent& s) {
    std::size_t n = 1;
    for (auto f : s) n += f.size();
    return n;
}

ProveResult prove(const Sequent& s, System sys, bool memo) {
    if (sys == System::Seq00)
        requireL00(s);
    else if (sys == System::Seq0)
        requireFragment(s, Fragment::L0);
    else
        throw ShapeError("proof search supports seq00 and seq0 only");
    Searcher sr;
    sr.useMemo = memo;
    ProveResult r;
    r.deriv = sr.run(s, 0);
    r.proved = r.deriv != nullptr;
    if (!r.proved) r.trace = sr.failPath;
    r.stats = sr.stats;
    r.stats.depthBound = search_depth_bound(s);
    return r;
}

bool provable(const Sequent& s) { return prove(s).proved; }

std::string ProveResult::trace_string() const {
    std::string out;
    for (const auto& t : trace) {
        if (!out.empty()) out += '.';
        out += t.step;
    }
    return out;
}

SearchTree build_search_tree(const Sequent& s) {
    requireL00(s);
    return buildTree(s);
}

bool eval_tree(const SearchTree& t) {
    switch (t.kind) {
        case SearchKind::AxLeaf: return true;
        case SearchKind::FailLeaf: return false;
        case SearchKind::AndStep: {
            bool a = eval_tree(t.kids[0]);
            bool b = eval_tree(t.kids[1]);
            return a && b;
        }
        case SearchKind::Choice: {
            bool a = eval_tree(t.kids[0]);
            bool b = eval_tree(t.kids[1]);
            return a || b;
        }
        default: return eval_tree(t.kids[0]);
    }
}

bool eval_circuit(const Sequent& s) { return eval_tree(build_search_tree(s)); }

nlohmann::json search_tree_to_json(const SearchTree& t) {
    nlohmann::json j;
    j["sequent"] = render(t.seq);
    j["kind"] = search_kind_name(t.kind);
    if (t.choice >= 0) j["choice"] = t.choice;
    j["children"] = nlohmann::json::array();
    for (const auto& k : t.kids) j["children"].push_back(search_tree_to_json(k));
    return j;
}

nlohmann::json trace_to_json(const std::vector<TraceStep>& t) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : t) j.push_back({{"sequent", render(s.seq)}, {"step", s.step}});
    return j;
}

}  // namespace pdl
