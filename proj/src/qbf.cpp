#include "pdlkit/qbf.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "pdlkit/errors.hpp"
#include "pdlkit/expansion.hpp"
#include "pdlkit/prover.hpp"
#include "pdlkit/semantics.hpp"

namespace pdl {

namespace {

// Flattened, sorted, duplicate-free disjunction; nullopt when empty.
std::optional<Formula> canonicalOr(const std::vector<std::optional<Formula>>& parts) {
    std::vector<Formula> ds;
    for (const auto& p : parts)
        if (p)
            for (auto d : disjuncts(*p)) ds.push_back(d);
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    return big_or(ds);
}

std::uint64_t keyOf(const std::optional<Formula>& f) { return f ? f->id() : 0; }

}  // namespace

BcnfShape ConvertedBcnf::shape() const {
    BcnfShape out;
    out.prog = prog;
    for (const auto& r : rows) out.rows.push_back(BcnfRow{r.B, r.C, r.D});
    return out;
}

int ConvertedBcnf::n() const {
    int n = 0;
    for (const auto& r : rows) n += static_cast<int>(r.J.size());
    return n;
}

ConvertedBcnf bdnf_to_bcnf(const BdnfShape& a) {
    ConvertedBcnf out;
    out.prog = a.prog;
    out.s = static_cast<int>(a.boxRows.size());
    out.t = static_cast<int>(a.diaRows.size());
    int width = out.s + out.t;
    if (width > 20) throw BoundError("bdnf_to_bcnf: 2^" + std::to_string(width) + " conjuncts");
    for (std::uint32_t mask = 0; mask < (1u << width); ++mask) {
        XiRow row;
        std::vector<Formula> bs;
        if (a.F) bs.push_back(*a.F);
        bool constantOne = false;
        std::vector<Formula> hs;
        for (int k = 0; k < width; ++k) {
            int choice = (mask >> (width - 1 - k)) & 1 ? 2 : 1;
            row.xi.push_back(choice);
            const BdnfRow& src = k < out.s ? a.boxRows[static_cast<std::size_t>(k)]
                                           : a.diaRows[static_cast<std::size_t>(k - out.s)];
            if (choice == 1) {
                if (src.guard)
                    bs.push_back(*src.guard);
                else
                    constantOne = true;
            } else if (k < out.s) {
                row.J.push_back(k + 1);
                row.D.push_back(src.body);
            } else {
                hs.push_back(src.body);
            }
        }
        row.B = constantOne ? std::optional<Formula>(verum()) : big_or(bs);
        row.C = big_or(hs);
        out.rows.push_back(std::move(row));
    }
    return out;
}

// ---- f ----

bool FRecursion::taut(const std::vector<std::optional<Formula>>& parts) {
    auto y = canonicalOr(parts);
    if (!y) return false;
    auto it = taut_.find(y->id());
    if (it != taut_.end()) return it->second;
    ++tautCalls_;
    bool v = taut_check(*y);
    taut_.emplace(y->id(), v);
    return v;
}

bool FRecursion::operator()(int i, std::optional<Formula> x) {
    x = canonicalOr({x});
    auto key = std::make_pair(i, keyOf(x));
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool all = true;
    for (const auto& row : r_.rows) {
        if (taut({row.B, x})) continue;
        bool some = false;
        for (auto d : row.D) {
            some = i == 0 ? taut({row.C, d}) : (*this)(i - 1, canonicalOr({row.C, d}));
            if (some) break;
        }
        if (!some) {
            all = false;
            break;
        }
    }
    memo_.emplace(key, all);
    return all;
}

bool f_eval(int i, std::optional<Formula> x, const BcnfShape& r) { return FRecursion(r)(i, x); }

// ---- decision ----

namespace {
BdneInstance fromStarred(const StarredExpr& e) {
    BdneInstance inst{recognize_bdnf(e.A), e.A, e.Z};
    if (!(inst.shape.prog == e.prog))
        throw ShapeError("shape mismatch: body modalities use " + render(inst.shape.prog) + " but the star is over " +
                         render(e.prog));
    return inst;
}
}  // namespace

BdneInstance bdne_instance(Formula s) { return fromStarred(split_starred(s)); }
BdneInstance bdne_instance(const Sequent& s) { return fromStarred(split_starred(s)); }

std::string via_name(Via v) {
    switch (v) {
        case Via::F: return "f";
        case Via::Expansion: return "expansion";
        case Via::Qbf: return "qbf";
    }
    return "f";
}
Via via_from_name(const std::string& s) {
    if (s == "f") return Via::F;
    if (s == "expansion") return Via::Expansion;
    if (s == "qbf") return Via::Qbf;
    throw ShapeError("unknown route '" + s + "' (expected f, expansion or qbf)");
}

BdneDecision decide_bdne(const BdneInstance& inst, Via via) {
    BdneDecision d;
    d.converted = bdnf_to_bcnf(inst.shape);
    d.n = d.converted.n();
    d.xiCount = d.converted.rows.size();
    BcnfShape r = d.converted.shape();
    switch (via) {
        case Via::F: d.valid = FRecursion(r)(d.n + 1, inst.Z); break;
        case Via::Expansion: {
            Sequent pi;
            if (inst.Z) pi.push_back(*inst.Z);
            d.valid = prove(expand(render_bcnf(r), pi, d.n + 1, r.prog), System::Seq00, true).proved;
            break;
        }
        case Via::Qbf: d.valid = qbf_eval(emit_qbf(r, inst.Z, d.n + 1)); break;
    }
    return d;
}
bool decide_bdne(Formula s, Via via) { return decide_bdne(bdne_instance(s), via).valid; }

// ---- QBF ----

namespace {
class Emitter {
public:
    Emitter(const BcnfShape& r, QbfFormula& q) : r_(r), q_(q) {}

    int node(int i, std::optional<Formula> x) {
        auto key = std::make_pair(i, keyOf(x));
        if (auto it = gates_.find(key); it != gates_.end()) return it->second;
        QbfFormula::Node conj;
        conj.kind = QbfFormula::Kind::And;
        for (const auto& row : r_.rows) {
            QbfFormula::Node disj;
            disj.kind = QbfFormula::Kind::Or;
            disj.kids.push_back(leaf(canonicalOr({row.B, x})));
            for (auto d : row.D) {
                auto y = canonicalOr({row.C, d});
                disj.kids.push_back(i == 0 ? leaf(y) : node(i - 1, y));
            }
            conj.kids.push_back(push(std::move(disj)));
        }
        int id = push(std::move(conj));
        gates_.emplace(key, id);
        return id;
    }

private:
    int push(QbfFormula::Node n) {
        q_.nodes.push_back(std::move(n));
        return static_cast<int>(q_.nodes.size()) - 1;
    }
    int leaf(std::optional<Formula> y) {
        Formula m = y ? *y : falsum();
        if (auto it = leaves_.find(m.id()); it != leaves_.end()) return it->second;
        QbfFormula::Node n;
        n.kind = QbfFormula::Kind::Leaf;
        n.matrix = m;
        auto vs = variables(m);
        n.vars.assign(vs.begin(), vs.end());
        int id = push(std::move(n));
        leaves_.emplace(m.id(), id);
        return id;
    }

    const BcnfShape& r_;
    QbfFormula& q_;
    std::map<std::pair<int, std::uint64_t>, int> gates_;
    std::map<std::uint64_t, int> leaves_;
};

// Propositional evaluation over an assignment indexed by variable position.
bool evalProp(Formula f, const std::vector<std::string>& vars, std::uint64_t asg) {
    switch (f.kind()) {
        case FKind::Lit: {
            auto pos = std::lower_bound(vars.begin(), vars.end(), f.var()) - vars.begin();
            bool v = (asg >> pos) & 1;
            return v == f.positive();
        }
        case FKind::Or: return evalProp(f.left(), vars, asg) || evalProp(f.right(), vars, asg);
        case FKind::And: return evalProp(f.left(), vars, asg) && evalProp(f.right(), vars, asg);
        default: throw ShapeError("qbf leaf with modal matrix");
    }
}

bool closedTrue(const QbfFormula::Node& n) {
    if (n.vars.size() > 24) throw BoundError("qbf leaf with " + std::to_string(n.vars.size()) + " variables");
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n.vars.size()); ++a)
        if (!evalProp(n.matrix, n.vars, a)) return false;
    return true;
}
}  // namespace

QbfFormula emit_qbf(const BcnfShape& r, std::optional<Formula> z, int depth) {
    QbfFormula q;
    Emitter em(r, q);
    q.root = em.node(depth, canonicalOr({z}));
    return q;
}

QbfFormula emit_qbf(const BdneInstance& inst) {
    auto conv = bdnf_to_bcnf(inst.shape);
    return emit_qbf(conv.shape(), inst.Z, conv.n() + 1);
}

std::size_t QbfFormula::dag_size() const {
    std::size_t total = 0;
    for (const auto& n : nodes)
        total += n.kind == Kind::Leaf ? n.matrix.size() + n.vars.size() : 1 + n.kids.size();
    return total;
}

long double QbfFormula::tree_size() const {
    // children always precede parents in `nodes`
    std::vector<long double> sz(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.kind == Kind::Leaf) {
            sz[i] = static_cast<long double>(n.matrix.size() + n.vars.size());
            continue;
        }
        sz[i] = 1;
        for (int k : n.kids) sz[i] += 1 + sz[static_cast<std::size_t>(k)];
    }
    return root < 0 ? 0 : sz[static_cast<std::size_t>(root)];
}

std::size_t QbfFormula::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.kind == Kind::Leaf; }));
}

bool qbf_eval(const QbfFormula& q) {
    std::vector<char> val(q.nodes.size());
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const auto& n = q.nodes[i];
        switch (n.kind) {
            case QbfFormula::Kind::Leaf: val[i] = closedTrue(n); break;
            case QbfFormula::Kind::And:
                val[i] = std::all_of(n.kids.begin(), n.kids.end(), [&](int k) { return val[static_cast<std::size_t>(k)]; });
                break;
            case QbfFormula::Kind::Or:
                val[i] = std::any_of(n.kids.begin(), n.kids.end(), [&](int k) { return val[static_cast<std::size_t>(k)]; });
                break;
        }
    }
    return val.at(static_cast<std::size_t>(q.root));
}

nlohmann::json qbf_to_json(const QbfFormula& q) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : q.nodes) {
        nlohmann::json j;
        if (n.kind == QbfFormula::Kind::Leaf) {
            j["kind"] = "forall";
            j["vars"] = n.vars;
            j["matrix"] = render(n.matrix);
        } else {
            j["kind"] = n.kind == QbfFormula::Kind::And ? "and" : "or";
            j["children"] = n.kids;
        }
        nodes.push_back(std::move(j));
    }
    return {{"root", q.root}, {"nodes", nodes}, {"dag_size", q.dag_size()}, {"tree_size", static_cast<double>(q.tree_size())}};
}

// ---- QDIMACS ----

namespace {
class Tseitin {
public:
    Tseitin(const QbfFormula& q, std::size_t budget) : q_(q), budget_(budget) {}

    QdimacsExport run() {
        // universal block: every leaf gets its own copy of its variables
        std::vector<int> base(q_.nodes.size(), 0);
        for (std::size_t i = 0; i < q_.nodes.size(); ++i)
            if (q_.nodes[i].kind == QbfFormula::Kind::Leaf) {
                base[i] = universals_;
                universals_ += static_cast<int>(q_.nodes[i].vars.size());
            }
        next_ = universals_;
        std::vector<int> lit(q_.nodes.size(), 0);
        for (std::size_t i = 0; i < q_.nodes.size(); ++i) {
            const auto& n = q_.nodes[i];
            if (n.kind == QbfFormula::Kind::Leaf) {
                std::unordered_map<std::uint64_t, int> memo;
                lit[i] = matrix(n.matrix, n.vars, base[i], memo);
            } else {
                std::vector<int> ins;
                for (int k : n.kids) ins.push_back(lit[static_cast<std::size_t>(k)]);
                lit[i] = gate(n.kind == QbfFormula::Kind::And, ins);
            }
        }
        emit({lit.at(static_cast<std::size_t>(q_.root))});

        QdimacsExport out;
        out.universals = universals_;
        out.gates = next_ - universals_;
        out.clauses = clauses_.size();
        std::ostringstream os;
        os << "c universally closed AND/OR combination, Tseitin gates existential\n";
        os << "p cnf " << next_ << ' ' << clauses_.size() << '\n';
        if (universals_ > 0) {
            os << 'a';
            for (int v = 1; v <= universals_; ++v) os << ' ' << v;
            os << " 0\n";
        }
        if (next_ > universals_) {
            os << 'e';
            for (int v = universals_ + 1; v <= next_; ++v) os << ' ' << v;
            os << " 0\n";
        }
        for (const auto& c : clauses_) {
            for (int l : c) os << l << ' ';
            os << "0\n";
        }
        out.text = os.str();
        return out;
    }

private:
    void emit(std::vector<int> c) {
        if (clauses_.size() >= budget_)
            throw BoundError("Tseitin encoding exceeds the clause budget of " + std::to_string(budget_));
        clauses_.push_back(std::move(c));
    }
    int gate(bool isAnd, const std::vector<int>& ins) {
        int g = ++next_;
        std::vector<int> big{isAnd ? g : -g};
        for (int a : ins) {
            emit(isAnd ? std::vector<int>{-g, a} : std::vector<int>{g, -a});
            big.push_back(isAnd ? -a : a);
        }
        emit(std::move(big));
        return g;
    }
    int matrix(Formula f, const std::vector<std::string>& vars, int base,
               std::unordered_map<std::uint64_t, int>& memo) {
        if (f.is_lit()) {
            int v = base + 1 + static_cast<int>(std::lower_bound(vars.begin(), vars.end(), f.var()) - vars.begin());
            return f.positive() ? v : -v;
        }
        if (auto it = memo.find(f.id()); it != memo.end()) return it->second;
        int l = matrix(f.left(), vars, base, memo);
        int r = matrix(f.right(), vars, base, memo);
        int g = gate(f.kind() == FKind::And, {l, r});
        memo.emplace(f.id(), g);
        return g;
    }

    const QbfFormula& q_;
    std::size_t budget_;
    int universals_ = 0;
    int next_ = 0;
    std::vector<std::vector<int>> clauses_;
};
}  // namespace

QdimacsExport export_qdimacs(const QbfFormula& q, std::size_t clauseBudget) { return Tseitin(q, clauseBudget).run(); }

bool check_qdimacs(const std::string& text, int maxUniversals) {
    std::istringstream in(text);
    std::string line;
    int nvars = 0;
    std::vector<int> forall;
    std::vector<std::vector<int>> clauses;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, cnf;
            std::size_t nc = 0;
            ls >> p >> cnf >> nvars >> nc;
            continue;
        }
        if (line[0] == 'a' || line[0] == 'e') {
            char tag;
            ls >> tag;
            int v;
            while (ls >> v && v != 0)
                if (tag == 'a') forall.push_back(v);
            continue;
        }
        std::vector<int> c;
        int l;
        while (ls >> l && l != 0) c.push_back(l);
        clauses.push_back(std::move(c));
    }
    if (static_cast<int>(forall.size()) > maxUniversals)
        throw BoundError("check_qdimacs: " + std::to_string(forall.size()) + " universal variables");

    std::vector<std::vector<std::size_t>> watch(static_cast<std::size_t>(nvars) + 1);
    for (std::size_t c = 0; c < clauses.size(); ++c)
        for (int l : clauses[c]) watch[static_cast<std::size_t>(std::abs(l))].push_back(c);

    for (std::uint64_t a = 0; a < (std::uint64_t{1} << forall.size()); ++a) {
        std::vector<int> val(static_cast<std::size_t>(nvars) + 1, 0);  // +1 true, -1 false
        std::vector<int> queue;
        for (std::size_t k = 0; k < forall.size(); ++k) {
            val[static_cast<std::size_t>(forall[k])] = (a >> k) & 1 ? 1 : -1;
            queue.push_back(forall[k]);
        }
        auto litVal = [&](int l) { int v = val[static_cast<std::size_t>(std::abs(l))]; return l > 0 ? v : -v; };
        bool conflict = false;
        auto scan = [&](std::size_t c) {
            int unassigned = 0, last = 0;
            for (int l : clauses[c]) {
                int v = litVal(l);
                if (v > 0) return;
                if (v == 0) {
                    ++unassigned;
                    last = l;
                }
            }
            if (unassigned == 0) {
                conflict = true;
            } else if (unassigned == 1) {
                val[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
                queue.push_back(std::abs(last));
            }
        };
        for (std::size_t c = 0; c < clauses.size() && !conflict; ++c) scan(c);
        while (!queue.empty() && !conflict) {
            int v = queue.back();
            queue.pop_back();
            for (std::size_t c : watch[static_cast<std::size_t>(v)]) {
                scan(c);
                if (conflict) break;
            }
        }
        if (conflict) return false;
        for (int v = 1; v <= nvars; ++v)
            if (val[static_cast<std::size_t>(v)] == 0)
                throw ShapeError("check_qdimacs: gate variable " + std::to_string(v) + " not determined by propagation");
    }
    return true;
}

}  // namespace pdl
