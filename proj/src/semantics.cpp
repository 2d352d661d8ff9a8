#include "pdlkit/semantics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_set>
#include <iterator>
#include <set>
#include <stdexcept>

namespace pdl {

nlohmann::json frame_to_json(const KripkeFrame& f) {
    nlohmann::json j;
    j["worlds"] = f.worlds;
    j["access"] = nlohmann::json::object();
    for (const auto& [p, edges] : f.access) {
        auto& arr = j["access"][p] = nlohmann::json::array();
        for (auto [u, v] : edges) arr.push_back({u, v});
    }
    j["valuation"] = nlohmann::json::object();
    for (const auto& [x, ws] : f.valuation) j["valuation"][x] = std::vector<int>(ws.begin(), ws.end());
    return j;
}

KripkeFrame frame_from_json(const nlohmann::json& j) {
    KripkeFrame f;
    f.worlds = j.at("worlds").get<int>();
    if (f.worlds < 1) throw ShapeError("frame needs at least one world");
    auto inRange = [&](int w) {
        if (w < 0 || w >= f.worlds) throw ShapeError("frame references undeclared world " + std::to_string(w));
        return w;
    };
    if (j.contains("access"))
        for (const auto& [p, edges] : j.at("access").items())
            for (const auto& e : edges) f.add_edge(p, inRange(e.at(0).get<int>()), inRange(e.at(1).get<int>()));
    if (j.contains("valuation"))
        for (const auto& [x, ws] : j.at("valuation").items())
            for (const auto& w : ws) f.set_true(x, inRange(w.get<int>()));
    return f;
}

// ---- evaluation ----
Evaluator::Evaluator(const KripkeFrame& frame) : frame_(frame) {}

const Evaluator::Rel& Evaluator::relation(Program p) {
    if (auto it = rel_.find(p.id()); it != rel_.end()) return it->second;
    const int n = frame_.worlds;
    Rel r(n, std::vector<char>(n, 0));
    switch (p.kind()) {
        case ProgKind::Atom:
            if (auto it = frame_.access.find(p.name()); it != frame_.access.end())
                for (auto [u, v] : it->second) r[u][v] = 1;
            break;
        case ProgKind::Union: {
            const Rel a = relation(p.left());
            const Rel& b = relation(p.right());
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v) r[u][v] = a[u][v] || b[u][v];
            break;
        }
        case ProgKind::Comp: {
            const Rel a = relation(p.left());
            const Rel& b = relation(p.right());
            for (int u = 0; u < n; ++u)
                for (int m = 0; m < n; ++m)
                    if (a[u][m])
                        for (int v = 0; v < n; ++v)
                            if (b[m][v]) r[u][v] = 1;
            break;
        }
        case ProgKind::Star: {
            r = relation(p.body());
            for (int u = 0; u < n; ++u) r[u][u] = 1;
            for (int m = 0; m < n; ++m)
                for (int u = 0; u < n; ++u)
                    if (r[u][m])
                        for (int v = 0; v < n; ++v)
                            if (r[m][v]) r[u][v] = 1;
            break;
        }
    }
    return rel_.emplace(p.id(), std::move(r)).first->second;
}

const std::vector<char>& Evaluator::truth(Formula f) {
    if (auto it = truth_.find(f.id()); it != truth_.end()) return it->second;
    const int n = frame_.worlds;
    std::vector<char> t(n, 0);
    switch (f.kind()) {
        case FKind::Lit: {
            auto it = frame_.valuation.find(f.var());
            for (int w = 0; w < n; ++w) {
                bool v = it != frame_.valuation.end() && it->second.count(w);
                t[w] = v == f.positive();
            }
            break;
        }
        case FKind::Or:
        case FKind::And: {
            const auto a = truth(f.left());
            const auto& b = truth(f.right());
            for (int w = 0; w < n; ++w) t[w] = f.kind() == FKind::Or ? (a[w] || b[w]) : (a[w] && b[w]);
            break;
        }
        case FKind::Box:
        case FKind::Dia: {
            const auto body = truth(f.body());
            const Rel& r = relation(f.prog());
            bool isBox = f.is_box();
            for (int w = 0; w < n; ++w) {
                bool acc = isBox;
                for (int v = 0; v < n; ++v)
                    if (r[w][v] && bool(body[v]) != isBox) {
                        acc = !isBox;
                        break;
                    }
                t[w] = acc;
            }
            break;
        }
    }
    return truth_.emplace(f.id(), std::move(t)).first->second;
}

bool Evaluator::holds(int world, Formula f) {
    if (world < 0 || world >= frame_.worlds) throw ShapeError("unknown world " + std::to_string(world));
    return truth(f)[world];
}

bool eval(const KripkeFrame& frame, int world, Formula f) { return Evaluator(frame).holds(world, f); }

// ---- satisfiability tableau for star-free sequents ----
namespace {

// Builds a finite model for a set of formulas required true. Each node's
// successors are one per diamond; depth and per-program branching are
// bounded, and hitting a bound marks the search non-authoritative.
class Tableau {
public:
    Tableau(int branching, int depth) : branching_(branching), depth_(depth) {}

    int run(std::vector<Formula> s) { return sat(std::move(s), depth_); }
    bool limited() const { return limited_; }

    int build(int n, KripkeFrame& fr, std::map<int, int>& done) const {
        if (auto it = done.find(n); it != done.end()) return it->second;
        int w = fr.add_world();
        done[n] = w;
        for (const auto& v : nodes_[n].vars) fr.set_true(v, w);
        for (const auto& [p, k] : nodes_[n].kids) fr.add_edge(p, w, build(k, fr, done));
        return w;
    }

private:
    struct Node {
        std::vector<std::string> vars;
        std::vector<std::pair<std::string, int>> kids;
    };
    int branching_, depth_;
    bool limited_ = false;
    std::vector<Node> nodes_;
    std::map<std::pair<std::vector<std::uint64_t>, int>, int> memo_;

    static void normalize(std::vector<Formula>& s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }

    int sat(std::vector<Formula> s, int rem) {
        normalize(s);
        std::vector<std::uint64_t> key;
        for (auto f : s) key.push_back(f.id());
        auto mk = std::make_pair(std::move(key), rem);
        if (auto it = memo_.find(mk); it != memo_.end()) return it->second;
        int out = expand(s, rem);
        memo_[mk] = out;
        return out;
    }

    int expand(const std::vector<Formula>& s, int rem) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            Formula f = s[i];
            if (f.kind() != FKind::Or && f.kind() != FKind::And) continue;
            std::vector<Formula> rest(s.begin(), s.end());
            rest.erase(rest.begin() + static_cast<long>(i));
            if (f.kind() == FKind::And) {
                rest.push_back(f.left());
                rest.push_back(f.right());
                return sat(std::move(rest), rem);
            }
            for (Formula part : {f.left(), f.right()}) {
                auto br = rest;
                br.push_back(part);
                int r = sat(std::move(br), rem);
                if (r >= 0) return r;
            }
            return -1;
        }
        // literals and modal formulas only
        Node node;
        std::map<std::string, std::vector<Formula>> boxes, dias;
        for (auto f : s) {
            if (f.is_lit()) {
                if (std::binary_search(s.begin(), s.end(), f.negate())) return -1;
                if (f.positive()) node.vars.push_back(f.var());
            } else if (f.is_box()) {
                boxes[f.prog().name()].push_back(f.body());
            } else {
                dias[f.prog().name()].push_back(f.body());
            }
        }
        for (const auto& [p, ds] : dias) {
            if (rem == 0 || static_cast<int>(ds.size()) > branching_) {
                limited_ = true;
                return -1;
            }
            for (auto d : ds) {
                std::vector<Formula> child = boxes[p];
                child.push_back(d);
                int k = sat(std::move(child), rem - 1);
                if (k < 0) return -1;
                node.kids.emplace_back(p, k);
            }
        }
        nodes_.push_back(std::move(node));
        return static_cast<int>(nodes_.size()) - 1;
    }
};

// Starred input: enumerate every frame with up to sizeBound worlds.
Verdict bruteForce(const Sequent& s, int sizeBound) {
    std::set<std::string> varsS = variables(s), progsS;
    for (auto f : s)
        for (const auto& p : atomic_programs_of(f)) progsS.insert(p);
    std::vector<std::string> vars(varsS.begin(), varsS.end()), progs(progsS.begin(), progsS.end());
    Verdict out;
    out.authoritative = false;
    const std::uint64_t cap = 1u << 21;
    std::uint64_t spent = 0;
    for (int n = 1; n <= sizeBound; ++n) {
        std::size_t bits = static_cast<std::size_t>(n) * n * progs.size() + static_cast<std::size_t>(n) * vars.size();
        if (bits >= 40 || spent + (std::uint64_t(1) << bits) > cap) break;
        for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << bits); ++mask) {
            ++spent;
            KripkeFrame fr;
            fr.worlds = n;
            std::size_t b = 0;
            for (const auto& p : progs)
                for (int u = 0; u < n; ++u)
                    for (int v = 0; v < n; ++v, ++b)
                        if (mask >> b & 1u) fr.add_edge(p, u, v);
            for (const auto& x : vars)
                for (int w = 0; w < n; ++w, ++b)
                    if (mask >> b & 1u) fr.set_true(x, w);
            Evaluator ev(fr);
            for (int w = 0; w < n; ++w) {
                bool all = true;
                for (auto f : s)
                    if (ev.holds(w, f)) {
                        all = false;
                        break;
                    }
                if (all) {
                    out.valid = false;
                    out.frame = fr;
                    out.world = w;
                    return out;
                }
            }
        }
    }
    return out;
}

bool anyStar(const Sequent& s) {
    return std::any_of(s.begin(), s.end(), [](Formula f) { return f.has_star(); });
}
}  // namespace

std::pair<int, int> authoritative_bounds(const Sequent& s) {
    std::map<std::string, std::set<std::uint64_t>> diamonds;
    int depth = 0;
    std::function<void(Formula)> walk = [&](Formula f) {
        if (f.kind() == FKind::Or || f.kind() == FKind::And) {
            walk(f.left());
            walk(f.right());
        } else if (f.is_modal()) {
            if (f.is_dia()) diamonds[f.prog().name()].insert(f.id());
            walk(f.body());
        }
    };
    for (auto f : s) {
        Formula g = interpret_into_L00(f).negate();
        depth = std::max<int>(depth, static_cast<int>(g.modal_depth()));
        walk(g);
    }
    int branching = 1;
    for (const auto& [p, ids] : diamonds) branching = std::max<int>(branching, static_cast<int>(ids.size()));
    return {branching, depth};
}

Verdict sequent_valid_bounded(const Sequent& s, int sizeBound, int depthBound) {
    if (anyStar(s)) return bruteForce(s, sizeBound);
    // falsify every member: its seq-negation (over atomic programs) must hold
    std::vector<Formula> goals;
    for (auto f : s) goals.push_back(interpret_into_L00(f).negate());
    Tableau tab(sizeBound, depthBound);
    int root = tab.run(goals);
    Verdict out;
    if (root < 0) {
        out.authoritative = !tab.limited();
        return out;
    }
    out.valid = false;
    out.authoritative = true;  // a countermodel is always conclusive
    KripkeFrame fr;
    std::map<int, int> done;
    out.world = tab.build(root, fr, done);
    Evaluator ev(fr);
    for (auto f : s)
        if (ev.holds(out.world, f)) throw std::logic_error("tableau produced a non-countermodel");
    out.frame = std::move(fr);
    return out;
}

Verdict sequent_valid(const Sequent& s) {
    if (anyStar(s)) throw ShapeError("sequent_valid: authoritative search needs star-free input");
    auto [b, d] = authoritative_bounds(s);
    return sequent_valid_bounded(s, b, d);
}

// ---- propositional validity ----
namespace {
std::uint64_t evalMask(Formula f, const std::map<std::string, std::uint64_t>& masks) {
    switch (f.kind()) {
        case FKind::Lit: {
            std::uint64_t m = masks.at(f.var());
            return f.positive() ? m : ~m;
        }
        case FKind::Or: return evalMask(f.left(), masks) | evalMask(f.right(), masks);
        case FKind::And: return evalMask(f.left(), masks) & evalMask(f.right(), masks);
        default: throw ShapeError("taut_check: modal input");
    }
}

// 0 false, 1 true, 2 unknown
int eval3(Formula f, const std::map<std::string, bool>& asg) {
    switch (f.kind()) {
        case FKind::Lit: {
            auto it = asg.find(f.var());
            if (it == asg.end()) return 2;
            return it->second == f.positive() ? 1 : 0;
        }
        case FKind::Or: {
            int a = eval3(f.left(), asg);
            if (a == 1) return 1;
            int b = eval3(f.right(), asg);
            if (b == 1) return 1;
            return (a == 0 && b == 0) ? 0 : 2;
        }
        case FKind::And: {
            int a = eval3(f.left(), asg);
            if (a == 0) return 0;
            int b = eval3(f.right(), asg);
            if (b == 0) return 0;
            return (a == 1 && b == 1) ? 1 : 2;
        }
        default: throw ShapeError("taut_check: modal input");
    }
}

bool splitTaut(Formula y, const std::vector<std::string>& vars, std::size_t next, std::map<std::string, bool>& asg) {
    int v = eval3(y, asg);
    if (v != 2) return v == 1;
    for (bool b : {false, true}) {
        asg[vars[next]] = b;
        bool ok = splitTaut(y, vars, next + 1, asg);
        asg.erase(vars[next]);
        if (!ok) return false;
    }
    return true;
}
}  // namespace

bool taut_check(Formula y) {
    if (!y.propositional()) throw ShapeError("taut_check: " + render(y) + " is not propositional");
    auto vs = variables(y);
    std::vector<std::string> vars(vs.begin(), vs.end());
    if (vars.size() > 20) {
        std::map<std::string, bool> asg;
        return splitTaut(y, vars, 0, asg);
    }
    static const std::uint64_t pattern[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                             0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
    std::size_t low = std::min<std::size_t>(vars.size(), 6);
    std::uint64_t blocks = std::uint64_t(1) << (vars.size() - low);
    std::uint64_t live = low == 6 ? ~std::uint64_t(0) : ((std::uint64_t(1) << (std::uint64_t(1) << low)) - 1);
    std::map<std::string, std::uint64_t> masks;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            masks[vars[i]] = i < 6 ? pattern[i] : ((b >> (i - 6) & 1u) ? ~std::uint64_t(0) : 0);
        if ((evalMask(y, masks) & live) != live) return false;
    }
    return true;
}

// ---- star closure over candidate valuations ----
namespace {

using Term = std::vector<int>;  // sorted modal-atom indices
using Dnf = std::vector<Term>;  // empty = false, {{}} = true

class Residual {
public:
    Residual(const std::unordered_set<std::string>& val, std::vector<Formula>& atoms) : val_(val), atoms_(atoms) {}

    Dnf of(Formula f) {
        switch (f.kind()) {
            case FKind::Lit: return (val_.count(f.var()) > 0) == f.positive() ? Dnf{Term{}} : Dnf{};
            case FKind::Or: {
                Dnf a = of(f.left());
                if (isTrue(a)) return a;
                Dnf b = of(f.right());
                if (isTrue(b)) return b;
                a.insert(a.end(), b.begin(), b.end());
                return tidy(std::move(a));
            }
            case FKind::And: {
                Dnf a = of(f.left());
                if (a.empty()) return a;
                Dnf b = of(f.right());
                if (b.empty()) return b;
                Dnf out;
                for (const auto& x : a)
                    for (const auto& y : b) {
                        Term t;
                        std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(t));
                        out.push_back(std::move(t));
                    }
                if (out.size() > 4096) throw BoundError("closure search: modal residual too large");
                return tidy(std::move(out));
            }
            default: return Dnf{Term{atomIndex(f)}};
        }
    }

private:
    static bool isTrue(const Dnf& d) { return d.size() == 1 && d[0].empty(); }
    // drop duplicates and absorbed terms
    static Dnf tidy(Dnf d) {
        std::sort(d.begin(), d.end(), [](const Term& a, const Term& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
        Dnf out;
        for (auto& t : d) {
            bool absorbed = false;
            for (const auto& u : out)
                if (std::includes(t.begin(), t.end(), u.begin(), u.end())) {
                    absorbed = true;
                    break;
                }
            if (!absorbed) out.push_back(std::move(t));
        }
        return out;
    }
    int atomIndex(Formula f) {
        auto it = std::find(atoms_.begin(), atoms_.end(), f);
        if (it != atoms_.end()) return static_cast<int>(it - atoms_.begin());
        atoms_.push_back(f);
        return static_cast<int>(atoms_.size()) - 1;
    }
    const std::unordered_set<std::string>& val_;
    std::vector<Formula>& atoms_;
};

bool propHolds(Formula f, const std::unordered_set<std::string>& val) {
    switch (f.kind()) {
        case FKind::Lit: return (val.count(f.var()) > 0) == f.positive();
        case FKind::Or: return propHolds(f.left(), val) || propHolds(f.right(), val);
        case FKind::And: return propHolds(f.left(), val) && propHolds(f.right(), val);
        default: throw ShapeError("closure search: nested modality in " + render(f));
    }
}

}  // namespace

ClosureResult closure_search(Formula invariant, std::optional<Formula> rootProp, Program prog,
                             const std::vector<std::set<std::string>>& candidates) {
    if (invariant.modal_depth() > 1) throw ShapeError("closure search: invariant modal depth exceeds 1");
    if (rootProp && !rootProp->propositional()) throw ShapeError("closure search: root condition is not propositional");
    const std::size_t n = candidates.size();
    std::vector<std::unordered_set<std::string>> vals;
    for (const auto& c : candidates) vals.emplace_back(c.begin(), c.end());
    std::vector<Formula> atoms;
    std::vector<Dnf> dnf;
    for (const auto& v : vals) dnf.push_back(Residual(v, atoms).of(invariant));
    for (auto a : atoms)
        if (!(a.prog() == prog)) throw ShapeError("closure search: modality over another program in " + render(a));

    // sat[j][k]: candidate j satisfies the body of atom k
    std::vector<std::vector<char>> sat(n, std::vector<char>(atoms.size()));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < atoms.size(); ++k) sat[j][k] = propHolds(atoms[k].body(), vals[j]);

    std::vector<char> alive(n);
    for (std::size_t i = 0; i < n; ++i) alive[i] = !dnf[i].empty();
    auto witness = [&](const Term& t, int dia) -> int {
        for (std::size_t j = 0; j < n; ++j) {
            if (!alive[j] || !sat[j][static_cast<std::size_t>(dia)]) continue;
            bool ok = true;
            for (int k : t)
                if (atoms[static_cast<std::size_t>(k)].is_box() && !sat[j][static_cast<std::size_t>(k)]) {
                    ok = false;
                    break;
                }
            if (ok) return static_cast<int>(j);
        }
        return -1;
    };
    auto workingTerm = [&](std::size_t i) -> const Term* {
        for (const auto& t : dnf[i]) {
            bool ok = true;
            for (int k : t)
                if (atoms[static_cast<std::size_t>(k)].is_dia() && witness(t, k) < 0) {
                    ok = false;
                    break;
                }
            if (ok) return &t;
        }
        return nullptr;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i)
            if (alive[i] && !workingTerm(i)) {
                alive[i] = 0;
                changed = true;
            }
    }

    ClosureResult out;
    out.states = n;
    out.alive = static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1));
    int root = -1;
    for (std::size_t i = 0; i < n && root < 0; ++i)
        if (alive[i] && (!rootProp || propHolds(*rootProp, vals[i]))) root = static_cast<int>(i);
    if (root < 0) return out;

    // frame on the states reachable from the root through chosen witnesses
    std::vector<int> world(n, -1);
    std::vector<std::size_t> todo{static_cast<std::size_t>(root)};
    world[static_cast<std::size_t>(root)] = out.frame.add_world();
    while (!todo.empty()) {
        std::size_t i = todo.back();
        todo.pop_back();
        for (const auto& x : candidates[i]) out.frame.set_true(x, world[i]);
        const Term* t = workingTerm(i);
        for (int k : *t) {
            if (!atoms[static_cast<std::size_t>(k)].is_dia()) continue;
            auto j = static_cast<std::size_t>(witness(*t, k));
            if (world[j] < 0) {
                world[j] = out.frame.add_world();
                todo.push_back(j);
            }
            out.frame.add_edge(prog.name(), world[i], world[j]);
        }
    }
    out.found = true;
    out.world = world[static_cast<std::size_t>(root)];
    Formula claim = Formula::box(Program::star(prog), invariant);
    if (rootProp) claim = Formula::conj(*rootProp, claim);
    if (!eval(out.frame, out.world, claim)) throw std::logic_error("closure search: built frame fails the invariant");
    return out;
}

Verdict star_closure_valid(Formula body, std::optional<Formula> z, Program prog) {
    if (body.modal_depth() > 1) throw ShapeError("star_closure_valid: body modal depth exceeds 1");
    if (z && !z->propositional()) throw ShapeError("star_closure_valid: side formula is not propositional");
    std::set<std::string> vs = variables(body);
    if (z)
        for (const auto& v : variables(*z)) vs.insert(v);
    std::vector<std::string> vars(vs.begin(), vs.end());
    if (vars.size() > 12) throw BoundError("star_closure_valid: too many variables");
    std::vector<std::set<std::string>> cands;
    for (std::uint32_t m = 0; m < (1u << vars.size()); ++m) {
        std::set<std::string> c;
        for (std::size_t i = 0; i < vars.size(); ++i)
            if ((m >> i) & 1u) c.insert(vars[i]);
        cands.push_back(std::move(c));
    }
    // a countermodel root falsifies Z and every reachable world falsifies A
    auto res = closure_search(body.negate(), z ? std::optional<Formula>(z->negate()) : std::nullopt, prog, cands);
    Verdict out;
    out.authoritative = true;
    if (!res.found) return out;
    out.valid = false;
    out.world = res.world;
    Formula whole = Formula::dia(Program::star(prog), body);
    if (z) whole = Formula::disj(whole, *z);
    if (eval(res.frame, out.world, whole)) throw std::logic_error("star_closure_valid: built frame is not a countermodel");
    out.frame = std::move(res.frame);
    return out;
}

}  // namespace pdl
