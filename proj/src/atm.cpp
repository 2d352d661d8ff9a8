#include "pdlkit/atm.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "pdlkit/errors.hpp"
#include "pdlkit/semantics.hpp"

namespace pdl {

namespace {
bool plainName(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) != 0; });
}
Formula lit(const std::string& v, bool positive = true) { return Formula::lit(v, positive); }
Formula sym(int i, const std::string& a, bool positive = true) { return lit(symbol_var(i, a), positive); }
Formula st(int i, const std::string& q, bool positive = true) { return lit(state_var(i, q), positive); }
Formula acc(bool positive = true) { return lit(kAcceptVar, positive); }
}  // namespace

std::string symbol_var(int cell, const std::string& a) { return "Sym_" + std::to_string(cell) + "_" + a; }
std::string state_var(int cell, const std::string& q) { return "State_" + std::to_string(cell) + "_" + q; }

std::vector<std::string> AtmSpec::tape_symbols() const {
    std::vector<std::string> out{kLeftEnd, kRightEnd};
    out.insert(out.end(), alphabet.begin(), alphabet.end());
    return out;
}

const std::vector<AtmMove>& AtmSpec::moves(const std::string& q, const std::string& a) const {
    static const std::vector<AtmMove> none;
    auto it = delta.find({q, a});
    return it == delta.end() ? none : it->second;
}

void validate(const AtmSpec& m) {
    auto fail = [](const std::string& why) { throw ShapeError("invalid machine: " + why); };
    if (m.space < 1) fail("space must be at least 1");
    if (static_cast<int>(m.input.size()) > m.space) fail("input longer than the space bound");
    std::set<std::string> syms;
    for (const auto& a : m.alphabet) {
        if (!plainName(a)) fail("symbol '" + a + "' is not alphanumeric");
        if (a == kLeftEnd || a == kRightEnd) fail("symbol '" + a + "' collides with an endmarker");
        if (!syms.insert(a).second) fail("duplicate symbol '" + a + "'");
    }
    if (!syms.count(m.blank)) fail("blank is not in the alphabet");
    std::set<std::string> qs;
    for (const auto& q : m.states) {
        if (!plainName(q)) fail("state '" + q + "' is not alphanumeric");
        if (q == "l" || q == "r") fail("state name '" + q + "' collides with a head annotation");
        if (!qs.insert(q).second) fail("duplicate state '" + q + "'");
    }
    if (!qs.count(m.start)) fail("start state is not a state");
    for (const auto& q : m.states)
        if (m.universal.count(q) + m.existential.count(q) != 1) fail("state '" + q + "' must be exactly one of universal/existential");
    for (const auto& q : m.universal)
        if (!qs.count(q)) fail("unknown universal state '" + q + "'");
    for (const auto& q : m.existential)
        if (!qs.count(q)) fail("unknown existential state '" + q + "'");
    for (const auto& a : m.input)
        if (!syms.count(a)) fail("input symbol '" + a + "' is not in the alphabet");
    syms.insert(kLeftEnd);
    syms.insert(kRightEnd);
    for (const auto& [key, moves] : m.delta) {
        const auto& [q, a] = key;
        if (!qs.count(q) || !syms.count(a)) fail("transition on unknown pair (" + q + "," + a + ")");
        for (const auto& mv : moves) {
            if (!qs.count(mv.state) || !syms.count(mv.write)) fail("transition to unknown state or symbol");
            if (mv.dir < -1 || mv.dir > 1) fail("head move must be -1, 0 or 1");
            if (a == kLeftEnd && (mv.write != kLeftEnd || mv.dir < 0)) fail("left endmarker must be kept and not passed");
            if (a == kRightEnd && (mv.write != kRightEnd || mv.dir > 0)) fail("right endmarker must be kept and not passed");
        }
    }
}

AtmSpec atm_from_json(const nlohmann::json& j) {
    AtmSpec m;
    try {
        m.alphabet = j.at("alphabet").get<std::vector<std::string>>();
        m.blank = j.at("blank").get<std::string>();
        m.states = j.at("states").get<std::vector<std::string>>();
        m.start = j.at("start").get<std::string>();
        for (const auto& q : j.value("universal", std::vector<std::string>{})) m.universal.insert(q);
        for (const auto& q : j.value("existential", std::vector<std::string>{})) m.existential.insert(q);
        for (const auto& [key, list] : j.at("delta").items()) {
            auto comma = key.find(',');
            if (comma == std::string::npos) throw ShapeError("delta key '" + key + "' is not 'state,symbol'");
            auto& moves = m.delta[{key.substr(0, comma), key.substr(comma + 1)}];
            for (const auto& t : list) moves.push_back({t.at(0).get<std::string>(), t.at(1).get<std::string>(), t.at(2).get<int>()});
        }
        const auto& in = j.at("input");
        if (in.is_string()) {
            for (char c : in.get<std::string>()) m.input.emplace_back(1, c);
        } else {
            m.input = in.get<std::vector<std::string>>();
        }
        m.space = j.at("space").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ShapeError(std::string("machine description: ") + e.what());
    }
    validate(m);
    return m;
}

nlohmann::json atm_to_json(const AtmSpec& m) {
    nlohmann::json delta = nlohmann::json::object();
    for (const auto& [key, moves] : m.delta) {
        auto& list = delta[key.first + "," + key.second];
        list = nlohmann::json::array();
        for (const auto& mv : moves) list.push_back({mv.state, mv.write, mv.dir});
    }
    return {{"alphabet", m.alphabet},
            {"blank", m.blank},
            {"states", m.states},
            {"start", m.start},
            {"universal", std::vector<std::string>(m.universal.begin(), m.universal.end())},
            {"existential", std::vector<std::string>(m.existential.begin(), m.existential.end())},
            {"delta", delta},
            {"input", m.input},
            {"space", m.space}};
}

// ---- encoding ----

namespace {

struct Builder {
    const AtmSpec& m;
    EncodeOptions opts;
    int last;  // N+1
    std::vector<std::string> gamma;
    std::vector<std::string> annotated;  // Q plus l, r

    Builder(const AtmSpec& spec, EncodeOptions o) : m(spec), opts(o), last(spec.space + 1), gamma(spec.tape_symbols()) {
        annotated = m.states;
        annotated.push_back("l");
        annotated.push_back("r");
    }

    bool inRange(int i) const { return i >= 0 && i <= last; }

    Formula start() const {
        std::vector<Formula> cs{st(0, m.start)};
        for (int i = 1; i <= m.space; ++i)
            cs.push_back(sym(i, i <= static_cast<int>(m.input.size()) ? m.input[static_cast<std::size_t>(i - 1)] : m.blank));
        return and_all(cs);
    }

    std::vector<Formula> config() const {
        std::vector<Formula> cs;
        for (int i = 0; i <= last; ++i) {
            std::vector<Formula> alts;
            for (const auto& a : gamma) {
                std::vector<Formula> one{sym(i, a)};
                for (const auto& b : gamma)
                    if (b != a) one.push_back(sym(i, b, false));
                alts.push_back(and_all(one));
            }
            cs.push_back(or_all(alts));
        }
        cs.push_back(sym(0, kLeftEnd));
        cs.push_back(sym(last, kRightEnd, opts.repairEndmarkers));
        std::vector<Formula> heads;
        for (int i = 0; i <= last; ++i)
            for (const auto& q : m.states) heads.push_back(st(i, q));
        cs.push_back(or_all(heads));
        for (int i = 0; i <= last; ++i) {
            std::vector<Formula> alts;
            for (const auto& q : annotated) {
                std::vector<Formula> one{st(i, q)};
                for (const auto& p : annotated)
                    if (p != q) one.push_back(st(i, p, false));
                alts.push_back(and_all(one));
            }
            cs.push_back(or_all(alts));
        }
        for (int i = 0; i < last; ++i) {
            for (const auto& q : m.states) cs.push_back(Formula::disj(st(i, q, false), st(i + 1, "l")));
            cs.push_back(Formula::disj(st(i, "l", false), st(i + 1, "l")));
        }
        for (int i = 1; i <= last; ++i) {
            for (const auto& q : m.states) cs.push_back(Formula::disj(st(i, q, false), st(i - 1, "r")));
            cs.push_back(Formula::disj(st(i, "r", false), st(i - 1, "r")));
        }
        return cs;
    }

    Program next() const { return Program::atom(kNextProgram); }

    Formula offHeadGuard(int i, bool negated) const {
        // negated=false: the guard under which off-head cells are kept
        if (opts.repairMove)
            return negated ? Formula::conj(st(i, "l", false), st(i, "r", false)) : Formula::disj(st(i, "l"), st(i, "r"));
        return negated ? Formula::disj(st(i, "l", false), st(i, "r", false)) : Formula::conj(st(i, "l"), st(i, "r"));
    }

    std::vector<AtmMove> movesAt(int i, const std::string& q, const std::string& a) const {
        std::vector<AtmMove> out;
        for (const auto& mv : m.moves(q, a))
            if (inRange(i + mv.dir)) out.push_back(mv);
        return out;
    }

    Formula effect(int i, const AtmMove& mv) const { return Formula::conj(sym(i, mv.write), st(i + mv.dir, mv.state)); }

    std::vector<Formula> move() const {
        std::vector<Formula> cs;
        for (int i = 0; i <= last; ++i) {
            std::vector<Formula> keep;
            for (const auto& a : gamma) keep.push_back(Formula::disj(sym(i, a, false), Formula::box(next(), sym(i, a))));
            cs.push_back(Formula::disj(offHeadGuard(i, true), and_all(keep)));
        }
        for (int i = 0; i <= last; ++i)
            for (const auto& a : gamma)
                for (const auto& q : m.states) {
                    std::vector<Formula> parts, effects;
                    for (const auto& mv : movesAt(i, q, a)) {
                        parts.push_back(Formula::dia(next(), effect(i, mv)));
                        effects.push_back(effect(i, mv));
                    }
                    parts.push_back(Formula::box(next(), or_all(effects)));
                    cs.push_back(or_all({sym(i, a, false), st(i, q, false), and_all(parts)}));
                }
        return cs;
    }

    std::vector<Formula> acceptance() const {
        std::vector<Formula> cs;
        Program n = next();
        Formula existential = Formula::conj(Formula::disj(acc(), Formula::box(n, acc(false))), Formula::disj(acc(false), Formula::dia(n, acc())));
        Formula universal = Formula::conj(Formula::disj(acc(), Formula::dia(n, acc(false))), Formula::disj(acc(false), Formula::box(n, acc())));
        for (int i = 0; i <= last; ++i)
            for (const auto& q : m.states)
                if (m.existential.count(q)) cs.push_back(Formula::disj(st(i, q, false), existential));
        for (int i = 0; i <= last; ++i)
            for (const auto& q : m.states)
                if (m.universal.count(q)) cs.push_back(Formula::disj(st(i, q, false), universal));
        return cs;
    }

    Formula headIn(const std::set<std::string>& group) const {
        std::vector<Formula> ds;
        for (int i = 0; i <= last; ++i)
            for (const auto& q : m.states)
                if (group.count(q)) ds.push_back(st(i, q));
        return or_all(ds);
    }
};

}  // namespace

AcceptsFormula encode_accepts(const AtmSpec& m, const EncodeOptions& opts) {
    validate(m);
    Builder b(m, opts);
    AcceptsFormula out;
    out.start = b.start();
    out.config = b.config();
    out.move = b.move();
    out.acceptance = b.acceptance();
    std::vector<Formula> all = out.config;
    all.insert(all.end(), out.move.begin(), out.move.end());
    all.insert(all.end(), out.acceptance.begin(), out.acceptance.end());
    out.invariant = and_all(all);
    out.formula = and_all({acc(), out.start, Formula::box(Program::star(b.next()), out.invariant)});
    return out;
}

NegationBdne encode_negation_bdne(const AtmSpec& m, const EncodeOptions& opts) {
    validate(m);
    Builder b(m, opts);
    NegationBdne out;
    BdnfShape& a = out.A;
    a.prog = b.next();
    a.F = seq_negate(and_all(b.config()));
    Formula inE = b.headIn(m.existential), inU = b.headIn(m.universal);
    a.boxRows.push_back({Formula::conj(inE, acc()), acc(false)});
    a.boxRows.push_back({Formula::conj(inU, acc(false)), acc()});
    a.diaRows.push_back({Formula::conj(inE, acc(false)), acc()});
    a.diaRows.push_back({Formula::conj(inU, acc()), acc(false)});
    for (int i = 0; i <= b.last; ++i)
        for (const auto& s : b.gamma)
            for (const auto& q : m.states)
                for (const auto& mv : b.movesAt(i, q, s)) {
                    a.boxRows.push_back({Formula::conj(sym(i, s), st(i, q)), seq_negate(b.effect(i, mv))});
                    ++out.alphaRows;
                }
    for (int i = 0; i <= b.last; ++i)
        for (const auto& s : b.gamma) {
            a.diaRows.push_back({Formula::conj(b.offHeadGuard(i, false), sym(i, s)), sym(i, s, false)});
            ++out.betaRows;
        }
    for (int i = 0; i <= b.last; ++i)
        for (const auto& s : b.gamma)
            for (const auto& q : m.states) {
                std::vector<Formula> misses;
                for (const auto& mv : b.movesAt(i, q, s)) misses.push_back(seq_negate(b.effect(i, mv)));
                a.diaRows.push_back({Formula::conj(sym(i, s), st(i, q)), and_all(misses)});
                ++out.gammaRows;
            }
    out.Z = Formula::disj(acc(false), seq_negate(b.start()));
    out.formula = render_starred(StarredExpr{a.prog, render_bdnf(a), out.Z});
    return out;
}

// ---- simulation ----

std::string verdict_name(AtmVerdict v) {
    switch (v) {
        case AtmVerdict::Accepts: return "accepts";
        case AtmVerdict::Rejects: return "rejects";
        case AtmVerdict::Bound: return "bound";
    }
    return "bound";
}

namespace {
struct Config {
    std::string state;
    int head = 0;
    std::vector<std::string> tape;
    friend auto operator<=>(const Config&, const Config&) = default;
};
}  // namespace

Simulation simulate_atm(const AtmSpec& m, std::size_t maxConfigs) {
    validate(m);
    Config init{m.start, 0, {kLeftEnd}};
    for (int i = 1; i <= m.space; ++i)
        init.tape.push_back(i <= static_cast<int>(m.input.size()) ? m.input[static_cast<std::size_t>(i - 1)] : m.blank);
    init.tape.push_back(kRightEnd);

    std::map<Config, int> index;
    std::vector<Config> configs;
    std::vector<std::vector<int>> succ;
    std::deque<int> todo;
    auto intern = [&](const Config& c) {
        auto [it, fresh] = index.emplace(c, static_cast<int>(configs.size()));
        if (fresh) {
            configs.push_back(c);
            succ.emplace_back();
            todo.push_back(it->second);
        }
        return it->second;
    };
    intern(init);
    Simulation out;
    while (!todo.empty()) {
        if (configs.size() > maxConfigs) return out;
        int id = todo.front();
        todo.pop_front();
        Config c = configs[static_cast<std::size_t>(id)];
        for (const auto& mv : m.moves(c.state, c.tape[static_cast<std::size_t>(c.head)])) {
            Config d = c;
            d.tape[static_cast<std::size_t>(c.head)] = mv.write;
            d.head += mv.dir;
            d.state = mv.state;
            int to = intern(d);
            succ[static_cast<std::size_t>(id)].push_back(to);
        }
    }
    out.configs = configs.size();
    // least fixpoint
    std::vector<char> accepted(configs.size(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < configs.size(); ++i) {
            if (accepted[i]) continue;
            const auto& ss = succ[i];
            bool universal = m.universal.count(configs[i].state) > 0;
            bool v = universal ? std::all_of(ss.begin(), ss.end(), [&](int j) { return accepted[static_cast<std::size_t>(j)] != 0; })
                               : std::any_of(ss.begin(), ss.end(), [&](int j) { return accepted[static_cast<std::size_t>(j)] != 0; });
            if (v) {
                accepted[i] = 1;
                changed = true;
            }
        }
    }
    // cycle detection by DFS colouring
    std::vector<int> colour(configs.size(), 0);
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    colour[0] = 1;
    while (!stack.empty() && !out.cyclic) {
        auto& [v, k] = stack.back();
        const auto& ss = succ[static_cast<std::size_t>(v)];
        if (k == ss.size()) {
            colour[static_cast<std::size_t>(v)] = 2;
            stack.pop_back();
            continue;
        }
        int w = ss[k++];
        if (colour[static_cast<std::size_t>(w)] == 1) out.cyclic = true;
        if (colour[static_cast<std::size_t>(w)] == 0) {
            colour[static_cast<std::size_t>(w)] = 1;
            stack.emplace_back(w, 0);
        }
    }
    out.verdict = accepted[0] ? AtmVerdict::Accepts : AtmVerdict::Rejects;
    return out;
}

// ---- bounded model search ----

ModelSearch accepts_model_search(const AtmSpec& m, const EncodeOptions& opts, std::size_t maxStates) {
    auto enc = encode_accepts(m, opts);
    Builder b(m, opts);
    const int last = b.last;
    const auto& gamma = b.gamma;
    std::vector<std::string> lastCell;
    for (const auto& a : gamma)
        if (opts.repairEndmarkers ? a == kRightEnd : a != kRightEnd) lastCell.push_back(a);
    std::size_t inner = 1;
    for (int i = 1; i < last; ++i) inner *= gamma.size();
    std::size_t total = static_cast<std::size_t>(last + 1) * m.states.size() * inner * lastCell.size() * 2;
    if (total > maxStates) throw BoundError("model search: " + std::to_string(total) + " candidate worlds exceed the bound");

    Formula config = and_all(enc.config);
    std::vector<std::set<std::string>> cands;
    for (int h = 0; h <= last; ++h)
        for (const auto& q : m.states)
            for (std::size_t code = 0; code < inner; ++code)
                for (const auto& endSym : lastCell)
                    for (bool accept : {false, true}) {
                        std::set<std::string> v;
                        v.insert(symbol_var(0, kLeftEnd));
                        std::size_t c = code;
                        for (int i = 1; i < last; ++i) {
                            v.insert(symbol_var(i, gamma[c % gamma.size()]));
                            c /= gamma.size();
                        }
                        v.insert(symbol_var(last, endSym));
                        for (int i = 0; i <= last; ++i) v.insert(state_var(i, i < h ? "r" : i > h ? "l" : q));
                        if (accept) v.insert(kAcceptVar);
                        cands.push_back(std::move(v));
                    }
    // every candidate is a configuration in the encoding's own sense
    KripkeFrame probe;
    probe.worlds = static_cast<int>(cands.size());
    for (std::size_t w = 0; w < cands.size(); ++w)
        for (const auto& x : cands[w]) probe.set_true(x, static_cast<int>(w));
    Evaluator ev(probe);
    for (std::size_t w = 0; w < cands.size(); ++w)
        if (!ev.holds(static_cast<int>(w), config)) throw std::logic_error("model search: candidate violates Config");

    auto res = closure_search(enc.invariant, Formula::conj(acc(), enc.start), b.next(), cands);
    ModelSearch out;
    out.candidates = cands.size();
    out.satisfiable = res.found;
    if (res.found) {
        if (!eval(res.frame, res.world, enc.formula)) throw std::logic_error("model search: frame does not satisfy the formula");
        out.worlds = static_cast<std::size_t>(res.frame.worlds);
    }
    return out;
}

}  // namespace pdl
