#include "pdlkit/expansion.hpp"

#include <algorithm>
#include <map>

#include "pdlkit/errors.hpp"
#include "pdlkit/prover.hpp"

namespace pdl {

Sequent expand(Formula body, const Sequent& pi, int k, Program prog) {
    if (k < 0) throw ShapeError("expansion depth must be non-negative");
    Sequent out;
    Formula cur = body;
    for (int m = 0; m <= k; ++m) {
        out.push_back(cur);
        cur = Formula::dia(prog, cur);
    }
    out.insert(out.end(), pi.begin(), pi.end());
    return out;
}

int bcnf_bound(const BcnfShape& shape) {
    int n = 0;
    for (const auto& r : shape.rows) n += static_cast<int>(r.D.size());
    return n;
}

namespace {

bool atomicModality(Formula f) { return f.is_modal() && f.prog().kind() == ProgKind::Atom; }

BcneInstance fromStarred(const StarredExpr& e) {
    BcneInstance inst;
    inst.body = e.A;
    if (atomicModality(e.A)) {
        BcnfRow row;
        (e.A.is_box() ? row.D.push_back(e.A.body()) : void(row.C = e.A.body()));
        inst.shape.prog = e.A.prog();
        inst.shape.rows.push_back(std::move(row));
    } else {
        inst.shape = recognize_bcnf(e.A);
        bool hasModal = false;
        for (const auto& r : inst.shape.rows) hasModal = hasModal || r.C || !r.D.empty();
        if (!hasModal) inst.shape.prog = e.prog;
    }
    if (!(inst.shape.prog == e.prog))
        throw ShapeError("shape mismatch: body modalities use " + render(inst.shape.prog) + " but the star is over " +
                         render(e.prog));
    if (e.Z) {
        if (!e.Z->propositional()) throw ShapeError("shape mismatch: side formula " + render(*e.Z) + " is not propositional");
        inst.pi.push_back(*e.Z);
    }
    return inst;
}

bool refuted(const Sequent& s) { return !prove(s).proved; }

Sequent withOpt(const std::optional<Formula>& f, const Sequent& rest) {
    Sequent out;
    if (f) out.push_back(*f);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

Sequent daughterLabel(const BcnfRow& r, std::size_t j) { return withOpt(r.C, {r.D[j]}); }

std::vector<std::uint64_t> labelKey(const Sequent& s) {
    std::vector<std::uint64_t> k;
    for (auto f : s) k.push_back(f.id());
    std::sort(k.begin(), k.end());
    return k;
}

class Refuter {
public:
    explicit Refuter(const BcnfShape& shape) : shape_(shape) {}

    // Row choice refuting A-hat_s with context `ctx`, or -1.
    int choose(const Sequent& ctx, int s) {
        auto key = std::make_pair(labelKey(ctx), s);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        int pick = -1;
        for (std::size_t i = 0; i < shape_.rows.size() && pick < 0; ++i) {
            const auto& r = shape_.rows[i];
            if (!refuted(withOpt(r.B, ctx))) continue;
            bool all = true;
            for (std::size_t j = 0; j < r.D.size() && all; ++j) {
                Sequent lab = daughterLabel(r, j);
                all = s == 0 ? refuted(lab) : choose(lab, s - 1) >= 0;
            }
            if (all) pick = static_cast<int>(i);
        }
        memo_.emplace(std::move(key), pick);
        return pick;
    }

    RefutationTree build(const Sequent& ctx, int s, RefutationTree::Role role) {
        RefutationTree node;
        node.role = role;
        node.label = ctx;
        node.row = choose(ctx, s);
        const auto& r = shape_.rows.at(static_cast<std::size_t>(node.row));
        RefutationTree son;
        son.role = RefutationTree::Role::Son;
        son.label = withOpt(r.B, ctx);
        node.kids.push_back(std::move(son));
        for (std::size_t j = 0; j < r.D.size(); ++j) {
            Sequent lab = daughterLabel(r, j);
            if (s == 0) {
                RefutationTree leaf;
                leaf.role = RefutationTree::Role::Daughter;
                leaf.label = lab;
                node.kids.push_back(std::move(leaf));
            } else {
                node.kids.push_back(build(lab, s - 1, RefutationTree::Role::Daughter));
            }
        }
        return node;
    }

private:
    const BcnfShape& shape_;
    std::map<std::pair<std::vector<std::uint64_t>, int>, int> memo_;
};

}  // namespace

BcneInstance bcne_instance(const Sequent& s) { return fromStarred(split_starred(s)); }
BcneInstance bcne_instance(Formula s) { return fromStarred(split_starred(s)); }

BcneDecision decide_bcne(const BcneInstance& inst) {
    BcneDecision d;
    d.bound = bcnf_bound(inst.shape);
    d.expansion = expand(inst.body, inst.pi, d.bound + 1, inst.shape.prog);
    d.valid = prove(d.expansion, System::Seq00, true).proved;
    return d;
}
bool decide_bcne(const Sequent& s) { return decide_bcne(bcne_instance(s)).valid; }
bool decide_bcne(Formula s) { return decide_bcne(bcne_instance(s)).valid; }

std::optional<int> min_expansion_k(Formula body, const Sequent& pi, int cap, Program prog) {
    for (int k = 0; k <= cap; ++k)
        if (prove(expand(body, pi, k, prog), System::Seq00, true).proved) return k;
    return std::nullopt;
}

std::optional<RefutationTree> build_refutation_tree(const BcnfShape& shape, const Sequent& pi, int k) {
    Refuter rf(shape);
    if (rf.choose(pi, k) < 0) return std::nullopt;
    return rf.build(pi, k, RefutationTree::Role::Root);
}

namespace {

struct TreeChecker {
    const BcnfShape& shape;
    int k;
    bool everyNode;
    RefutationCheck res;

    void fail(const std::string& why) {
        if (res.ok) res = RefutationCheck{false, why};
    }

    void visit(const RefutationTree& x, int depth) {
        if (!res.ok) return;
        bool leafExpected = x.role == RefutationTree::Role::Son || depth == k + 1;
        if (x.role == RefutationTree::Role::Daughter && depth > k + 1) return fail("daughter below depth k+1");
        if (leafExpected) {
            if (!x.kids.empty() || x.row >= 0) return fail("leaf position carries children at depth " + std::to_string(depth));
            if (!refuted(x.label)) fail("leaf label " + render(x.label) + " is provable");
            return;
        }
        if (x.row < 0 || x.row >= static_cast<int>(shape.rows.size())) return fail("inner node without a valid row");
        if (everyNode && !refuted(x.label)) return fail("inner label " + render(x.label) + " is provable");
        const auto& r = shape.rows[static_cast<std::size_t>(x.row)];
        if (x.kids.size() != r.D.size() + 1) return fail("inner node has wrong number of children");
        const auto& son = x.kids[0];
        if (son.role != RefutationTree::Role::Son || !multiset_equal(son.label, withOpt(r.B, x.label)))
            return fail("son label mismatch under " + render(x.label));
        visit(son, depth + 1);
        for (std::size_t j = 0; j < r.D.size(); ++j) {
            const auto& dau = x.kids[j + 1];
            if (dau.role != RefutationTree::Role::Daughter || !multiset_equal(dau.label, daughterLabel(r, j)))
                return fail("daughter label mismatch under " + render(x.label));
            visit(dau, depth + 1);
        }
    }
};

RefutationTree truncate(RefutationTree t, int depth, int maxDepth) {
    if (depth == maxDepth) {
        t.kids.clear();
        t.row = -1;
        return t;
    }
    for (auto& c : t.kids) c = truncate(std::move(c), depth + 1, maxDepth);
    return t;
}

struct Pumper {
    int s;
    // daughters on the current path (root excluded), outermost first
    std::vector<const RefutationTree*> path;

    RefutationTree walk(const RefutationTree& x, int depth) {
        if (x.role == RefutationTree::Role::Daughter) {
            for (const auto* earlier : path)
                if (multiset_equal(earlier->label, x.label)) return *earlier;
            if (x.kids.empty() && depth == s + 1)
                throw BoundError("pumping: no repeated daughter label on a path of length " + std::to_string(s + 1));
            path.push_back(&x);
        }
        RefutationTree out = x;
        out.kids.clear();
        for (const auto& c : x.kids) out.kids.push_back(walk(c, depth + 1));
        if (x.role == RefutationTree::Role::Daughter) path.pop_back();
        return out;
    }
};

}  // namespace

RefutationCheck verify_refutation_tree(const RefutationTree& t, const BcnfShape& shape, const Sequent& pi, int k,
                                       bool everyNode) {
    TreeChecker c{shape, k, everyNode, {}};
    if (t.role != RefutationTree::Role::Root || !multiset_equal(t.label, pi)) return {false, "root label differs from the context"};
    c.visit(t, 0);
    return c.res;
}

RefutationTree pump(const RefutationTree& t, int s) {
    Pumper p{s, {}};
    return truncate(p.walk(t, 0), 0, s + 2);
}

int tree_height(const RefutationTree& t) {
    int h = 0;
    for (const auto& c : t.kids) h = std::max(h, tree_height(c) + 1);
    return h;
}

nlohmann::json refutation_to_json(const RefutationTree& t) {
    static const char* roles[] = {"root", "son", "daughter"};
    nlohmann::json j;
    j["role"] = roles[static_cast<int>(t.role)];
    j["label"] = render(t.label);
    if (t.row >= 0) j["row"] = t.row + 1;
    if (!t.kids.empty()) {
        j["children"] = nlohmann::json::array();
        for (const auto& c : t.kids) j["children"].push_back(refutation_to_json(c));
    }
    return j;
}

}  // namespace pdl
