#include "pdlkit/formula.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <mutex>
#include <unordered_map>

namespace pdl {

struct ProgNode {
    ProgKind kind;
    std::string name;
    const ProgNode* l = nullptr;
    const ProgNode* r = nullptr;
    std::uint64_t id = 0;
    bool star = false;
    std::size_t pc = 0;
};

struct FNode {
    FKind kind;
    std::string var;
    bool pos = true;
    const FNode* l = nullptr;
    const FNode* r = nullptr;
    const ProgNode* prog = nullptr;
    std::uint64_t id = 0;
    const FNode* neg = nullptr;
    std::size_t pc = 0, sz = 0, md = 0;
    bool star = false, prop = false, atomicProgs = true;
};

namespace {
struct Key {
    int kind;
    std::string name;
    bool pos;
    std::uint64_t a, b, c;
    bool operator==(const Key&) const = default;
};
struct KeyHash {
    std::size_t operator()(const Key& k) const {
        std::size_t h = std::hash<std::string>{}(k.name);
        auto mix = [&](std::uint64_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        mix(static_cast<std::uint64_t>(k.kind));
        mix(k.pos);
        mix(k.a);
        mix(k.b);
        mix(k.c);
        return h;
    }
};
std::uint64_t idOf(const void* p, std::uint64_t id) { return p ? id : 0; }
}  // namespace

struct Registry {
    std::mutex mu;
    std::deque<ProgNode> progs;
    std::deque<FNode> forms;
    std::unordered_map<Key, const ProgNode*, KeyHash> progIndex;
    std::unordered_map<Key, const FNode*, KeyHash> formIndex;
    std::uint64_t next = 1;

    static Registry& get() {
        static Registry r;
        return r;
    }

    const ProgNode* prog(ProgKind k, std::string_view name, const ProgNode* l, const ProgNode* r) {
        std::lock_guard lock(mu);
        Key key{static_cast<int>(k), std::string(name), true, l ? l->id : 0, r ? r->id : 0, 0};
        if (auto it = progIndex.find(key); it != progIndex.end()) return it->second;
        ProgNode& n = progs.emplace_back();
        n.kind = k;
        n.name = name;
        n.l = l;
        n.r = r;
        n.id = next++;
        switch (k) {
            case ProgKind::Atom: break;
            case ProgKind::Comp:
            case ProgKind::Union:
                n.star = l->star || r->star;
                n.pc = 1 + l->pc + r->pc;
                break;
            case ProgKind::Star:
                n.star = true;
                n.pc = 1 + l->pc;
                break;
        }
        progIndex.emplace(std::move(key), &n);
        return &n;
    }

    static Key formKey(FKind k, const std::string& var, bool pos, const FNode* l, const FNode* r,
                       const ProgNode* p) {
        return Key{static_cast<int>(k), var, pos, idOf(l, l ? l->id : 0), idOf(r, r ? r->id : 0),
                   p ? p->id : 0};
    }

    FNode& build(FKind k, const std::string& var, bool pos, const FNode* l, const FNode* r,
                 const ProgNode* p) {
        FNode& n = forms.emplace_back();
        n.kind = k;
        n.var = var;
        n.pos = pos;
        n.l = l;
        n.r = r;
        n.prog = p;
        n.id = next++;
        switch (k) {
            case FKind::Lit:
                n.pc = n.sz = 1;
                n.prop = true;
                break;
            case FKind::Or:
            case FKind::And:
                n.pc = 1 + l->pc + r->pc;
                n.sz = 1 + l->sz + r->sz;
                n.md = std::max(l->md, r->md);
                n.star = l->star || r->star;
                n.prop = l->prop && r->prop;
                n.atomicProgs = l->atomicProgs && r->atomicProgs;
                break;
            case FKind::Box:
            case FKind::Dia:
                n.pc = p->pc + l->pc;
                n.sz = 1 + p->pc + l->sz;
                n.md = 1 + l->md;
                n.star = p->star || l->star;
                n.prop = false;
                n.atomicProgs = p->kind == ProgKind::Atom && l->atomicProgs;
                break;
        }
        return n;
    }

    const FNode* form(FKind k, std::string_view varv, bool pos, const FNode* l, const FNode* r,
                      const ProgNode* p) {
        std::lock_guard lock(mu);
        std::string var(varv);
        Key key = formKey(k, var, pos, l, r, p);
        if (auto it = formIndex.find(key); it != formIndex.end()) return it->second;
        FNode& n = build(k, var, pos, l, r, p);
        formIndex.emplace(key, &n);
        // The dual is built eagerly so negation is a pointer hop.
        FNode* d = nullptr;
        switch (k) {
            case FKind::Lit: d = &build(k, var, !pos, nullptr, nullptr, nullptr); break;
            case FKind::Or: d = &build(FKind::And, "", true, l->neg, r->neg, nullptr); break;
            case FKind::And: d = &build(FKind::Or, "", true, l->neg, r->neg, nullptr); break;
            case FKind::Box: d = &build(FKind::Dia, "", true, l->neg, nullptr, p); break;
            case FKind::Dia: d = &build(FKind::Box, "", true, l->neg, nullptr, p); break;
        }
        n.neg = d;
        d->neg = &n;
        formIndex.emplace(formKey(d->kind, d->var, d->pos, d->l, d->r, d->prog), d);
        return &n;
    }
};

// ---- Program ----
Program Program::atom(std::string_view name) {
    return Program(Registry::get().prog(ProgKind::Atom, name, nullptr, nullptr));
}
Program Program::comp(Program l, Program r) {
    return Program(Registry::get().prog(ProgKind::Comp, "", l.n_, r.n_));
}
Program Program::uni(Program l, Program r) {
    return Program(Registry::get().prog(ProgKind::Union, "", l.n_, r.n_));
}
Program Program::star(Program b) { return Program(Registry::get().prog(ProgKind::Star, "", b.n_, nullptr)); }
ProgKind Program::kind() const { return n_->kind; }
const std::string& Program::name() const { return n_->name; }
Program Program::left() const { return Program(n_->l); }
Program Program::right() const { return Program(n_->r); }
Program Program::body() const { return Program(n_->l); }
bool Program::has_star() const { return n_->star; }
std::size_t Program::plain_complexity() const { return n_->pc; }
std::uint64_t Program::id() const { return n_ ? n_->id : 0; }

// ---- Formula ----
Formula Formula::lit(std::string_view var, bool positive) {
    return Formula(Registry::get().form(FKind::Lit, var, positive, nullptr, nullptr, nullptr));
}
Formula Formula::disj(Formula l, Formula r) {
    return Formula(Registry::get().form(FKind::Or, "", true, l.n_, r.n_, nullptr));
}
Formula Formula::conj(Formula l, Formula r) {
    return Formula(Registry::get().form(FKind::And, "", true, l.n_, r.n_, nullptr));
}
Formula Formula::box(Program p, Formula b) {
    return Formula(Registry::get().form(FKind::Box, "", true, b.n_, nullptr, p.n_));
}
Formula Formula::dia(Program p, Formula b) {
    return Formula(Registry::get().form(FKind::Dia, "", true, b.n_, nullptr, p.n_));
}
FKind Formula::kind() const { return n_->kind; }
const std::string& Formula::var() const { return n_->var; }
bool Formula::positive() const { return n_->pos; }
Formula Formula::left() const { return Formula(n_->l); }
Formula Formula::right() const { return Formula(n_->r); }
Program Formula::prog() const { return Program(n_->prog); }
Formula Formula::body() const { return Formula(n_->l); }
Formula Formula::negate() const { return Formula(n_->neg); }
std::size_t Formula::plain_complexity() const { return n_->pc; }
std::size_t Formula::size() const { return n_->sz; }
std::size_t Formula::modal_depth() const { return n_->md; }
bool Formula::has_star() const { return n_->star; }
bool Formula::propositional() const { return n_->prop; }
bool Formula::atomic_programs() const { return n_->atomicProgs; }
std::uint64_t Formula::id() const { return n_ ? n_->id : 0; }

Formula verum() { return Formula::disj(Formula::lit("x0"), Formula::lit("x0", false)); }
Formula falsum() { return verum().negate(); }

std::optional<Formula> big_or(const std::vector<Formula>& fs) {
    if (fs.empty()) return std::nullopt;
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::disj(acc, fs[i]);
    return acc;
}
std::optional<Formula> big_and(const std::vector<Formula>& fs) {
    if (fs.empty()) return std::nullopt;
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::conj(acc, fs[i]);
    return acc;
}
Formula or_all(const std::vector<Formula>& fs) { return big_or(fs).value_or(falsum()); }
Formula and_all(const std::vector<Formula>& fs) { return big_and(fs).value_or(verum()); }

namespace {
void flatten(Formula f, FKind k, std::vector<Formula>& out) {
    if (f.kind() == k) {
        flatten(f.left(), k, out);
        flatten(f.right(), k, out);
    } else {
        out.push_back(f);
    }
}
}  // namespace
std::vector<Formula> disjuncts(Formula f) {
    std::vector<Formula> out;
    flatten(f, FKind::Or, out);
    return out;
}
std::vector<Formula> conjuncts(Formula f) {
    std::vector<Formula> out;
    flatten(f, FKind::And, out);
    return out;
}

Formula seq_negate(Formula f) { return f.negate(); }
std::size_t plain_complexity(Formula f) { return f.plain_complexity(); }
std::size_t plain_complexity(Program p) { return p.plain_complexity(); }
std::size_t sequent_size(const Sequent& s) {
    std::size_t n = 0;
    for (auto f : s) n += f.size();
    return n;
}

// ---- multisets ----
namespace {
Sequent sorted(Sequent s) {
    std::sort(s.begin(), s.end());
    return s;
}
}  // namespace
bool multiset_equal(Sequent a, Sequent b) { return sorted(std::move(a)) == sorted(std::move(b)); }
bool multiset_subset(Sequent a, Sequent b) {
    a = sorted(std::move(a));
    b = sorted(std::move(b));
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}
Sequent multiset_minus(const Sequent& a, const Sequent& b) {
    Sequent out = a;
    for (auto f : b)
        if (auto it = std::find(out.begin(), out.end(), f); it != out.end()) out.erase(it);
    return out;
}
std::size_t count_of(const Sequent& s, Formula f) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), f)); }
Sequent concat(Sequent a, const Sequent& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

// ---- parser ----
namespace {
class Parser {
public:
    explicit Parser(std::string_view t) : text_(t) {}

    Sequent sequent() {
        Sequent out;
        skip();
        if (at_end()) return out;
        out.push_back(disj());
        while (eat(',')) out.push_back(disj());
        expect_end();
        return out;
    }
    Formula formula() {
        Formula f = disj();
        expect_end();
        return f;
    }
    Program program_only() {
        Program p = prog_union();
        expect_end();
        return p;
    }

private:
    std::string_view text_;
    std::size_t i_ = 0;

    void skip() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    }
    bool at_end() {
        skip();
        return i_ >= text_.size();
    }
    bool peek(char c) {
        skip();
        return i_ < text_.size() && text_[i_] == c;
    }
    bool eat(char c) {
        if (peek(c)) {
            ++i_;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) { throw ParseError("syntax error: " + what, i_); }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    void expect_end() {
        if (!at_end()) fail(std::string("unexpected '") + text_[i_] + "'");
    }
    std::string ident() {
        skip();
        std::size_t s = i_;
        if (i_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
            ++i_;
            while (i_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_'))
                ++i_;
        }
        if (s == i_) fail("expected identifier");
        return std::string(text_.substr(s, i_ - s));
    }

    Formula disj() {
        Formula f = conj();
        while (eat('|')) f = Formula::disj(f, conj());
        return f;
    }
    Formula conj() {
        Formula f = unary();
        while (eat('&')) f = Formula::conj(f, unary());
        return f;
    }
    Formula unary() {
        if (eat('~')) {
            if (peek('(') || peek('[') || peek('<') || peek('~')) return unary().negate();
            return Formula::lit(ident(), false);
        }
        if (eat('(')) {
            Formula f = disj();
            expect(')');
            return f;
        }
        if (eat('[')) {
            Program p = prog_union();
            expect(']');
            return Formula::box(p, unary());
        }
        if (eat('<')) {
            Program p = prog_union();
            expect('>');
            return Formula::dia(p, unary());
        }
        return Formula::lit(ident(), true);
    }
    Program prog_union() {
        Program p = prog_comp();
        while (eat('+')) p = Program::uni(p, prog_comp());
        return p;
    }
    Program prog_comp() {
        Program p = prog_star();
        while (eat(';')) p = Program::comp(p, prog_star());
        return p;
    }
    Program prog_star() {
        Program p;
        if (eat('(')) {
            p = prog_union();
            expect(')');
        } else {
            p = Program::atom(ident());
        }
        while (eat('*')) p = Program::star(p);
        return p;
    }
};

// level 0: anything; 1: no bare union; 2: atom or star
void renderProg(Program p, int level, std::string& out) {
    switch (p.kind()) {
        case ProgKind::Atom: out += p.name(); return;
        case ProgKind::Union:
            if (level > 0) out += '(';
            renderProg(p.left(), 0, out);
            out += '+';
            renderProg(p.right(), 1, out);
            if (level > 0) out += ')';
            return;
        case ProgKind::Comp:
            if (level > 1) out += '(';
            renderProg(p.left(), 1, out);
            out += ';';
            renderProg(p.right(), 2, out);
            if (level > 1) out += ')';
            return;
        case ProgKind::Star:
            renderProg(p.body(), 2, out);
            out += '*';
            return;
    }
}

// level 0: anything; 1: no bare Or; 2: unary only
void renderForm(Formula f, int level, std::string& out) {
    switch (f.kind()) {
        case FKind::Lit:
            if (!f.positive()) out += '~';
            out += f.var();
            return;
        case FKind::Or:
            if (level > 0) out += '(';
            renderForm(f.left(), 0, out);
            out += " | ";
            renderForm(f.right(), 1, out);
            if (level > 0) out += ')';
            return;
        case FKind::And:
            if (level > 1) out += '(';
            renderForm(f.left(), 1, out);
            out += " & ";
            renderForm(f.right(), 2, out);
            if (level > 1) out += ')';
            return;
        case FKind::Box:
        case FKind::Dia:
            out += f.is_box() ? '[' : '<';
            renderProg(f.prog(), 0, out);
            out += f.is_box() ? ']' : '>';
            renderForm(f.body(), 2, out);
            return;
    }
}
}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).formula(); }
Sequent parse_sequent(std::string_view text) { return Parser(text).sequent(); }
Program parse_program(std::string_view text) { return Parser(text).program_only(); }

std::string render(Formula f) {
    std::string out;
    renderForm(f, 0, out);
    return out;
}
std::string render(Program p) {
    std::string out;
    renderProg(p, 0, out);
    return out;
}
std::string render(const Sequent& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += render(s[i]);
    }
    return out;
}

// ---- traversal ----
namespace {
void collectVars(Formula f, std::set<std::string>& out) {
    switch (f.kind()) {
        case FKind::Lit: out.insert(f.var()); return;
        case FKind::Or:
        case FKind::And:
            collectVars(f.left(), out);
            collectVars(f.right(), out);
            return;
        default: collectVars(f.body(), out);
    }
}
void collectProgAtoms(Program p, std::set<std::string>& out) {
    switch (p.kind()) {
        case ProgKind::Atom: out.insert(p.name()); return;
        case ProgKind::Star: collectProgAtoms(p.body(), out); return;
        default:
            collectProgAtoms(p.left(), out);
            collectProgAtoms(p.right(), out);
    }
}
void collectProgs(Formula f, std::set<std::string>& out) {
    switch (f.kind()) {
        case FKind::Lit: return;
        case FKind::Or:
        case FKind::And:
            collectProgs(f.left(), out);
            collectProgs(f.right(), out);
            return;
        default:
            collectProgAtoms(f.prog(), out);
            collectProgs(f.body(), out);
    }
}
}  // namespace

std::set<std::string> variables(Formula f) {
    std::set<std::string> out;
    collectVars(f, out);
    return out;
}
std::set<std::string> variables(const Sequent& s) {
    std::set<std::string> out;
    for (auto f : s) collectVars(f, out);
    return out;
}
std::set<std::string> atomic_programs_of(Formula f) {
    std::set<std::string> out;
    collectProgs(f, out);
    return out;
}

// ---- fragments ----
std::string fragment_name(Fragment f) {
    switch (f) {
        case Fragment::LEmpty: return "L_empty";
        case Fragment::L00: return "L00";
        case Fragment::L0: return "L0";
        case Fragment::FOR10: return "FOR10";
        case Fragment::FOR1: return "FOR1";
    }
    return "?";
}

namespace {
// FOR1: no box over a program containing a star.
bool noStarredBox(Formula f) {
    switch (f.kind()) {
        case FKind::Lit: return true;
        case FKind::Or:
        case FKind::And: return noStarredBox(f.left()) && noStarredBox(f.right());
        case FKind::Box: return !f.prog().has_star() && noStarredBox(f.body());
        case FKind::Dia: return noStarredBox(f.body());
    }
    return false;
}
// FOR10: boxes over atoms, diamonds over atoms or p*.
bool for10Programs(Formula f) {
    switch (f.kind()) {
        case FKind::Lit: return true;
        case FKind::Or:
        case FKind::And: return for10Programs(f.left()) && for10Programs(f.right());
        case FKind::Box: return f.prog().kind() == ProgKind::Atom && for10Programs(f.body());
        case FKind::Dia: {
            Program p = f.prog();
            bool ok = p.kind() == ProgKind::Atom ||
                      (p.kind() == ProgKind::Star && p.body().kind() == ProgKind::Atom);
            return ok && for10Programs(f.body());
        }
    }
    return false;
}
}  // namespace

bool in_fragment(Formula f, Fragment fr) {
    switch (fr) {
        case Fragment::LEmpty: return f.propositional();
        case Fragment::L00: return !f.has_star() && f.atomic_programs();
        case Fragment::L0: return !f.has_star();
        case Fragment::FOR1: return noStarredBox(f);
        case Fragment::FOR10: return noStarredBox(f) && for10Programs(f);
    }
    return false;
}
bool in_fragment(const Sequent& s, Fragment fr) {
    return std::all_of(s.begin(), s.end(), [&](Formula f) { return in_fragment(f, fr); });
}
std::set<Fragment> classify_fragment(Formula f) {
    std::set<Fragment> out;
    for (auto fr : {Fragment::LEmpty, Fragment::L00, Fragment::L0, Fragment::FOR10, Fragment::FOR1})
        if (in_fragment(f, fr)) out.insert(fr);
    return out;
}

Formula interpret_into_L00(Formula f) {
    switch (f.kind()) {
        case FKind::Lit: return f;
        case FKind::Or: return Formula::disj(interpret_into_L00(f.left()), interpret_into_L00(f.right()));
        case FKind::And: return Formula::conj(interpret_into_L00(f.left()), interpret_into_L00(f.right()));
        default: break;
    }
    bool isBox = f.is_box();
    Program p = f.prog();
    switch (p.kind()) {
        case ProgKind::Atom: return Formula::modal(isBox, p, interpret_into_L00(f.body()));
        case ProgKind::Comp:
            return interpret_into_L00(Formula::modal(isBox, p.left(), Formula::modal(isBox, p.right(), f.body())));
        case ProgKind::Union: {
            Formula a = interpret_into_L00(Formula::modal(isBox, p.left(), f.body()));
            Formula b = interpret_into_L00(Formula::modal(isBox, p.right(), f.body()));
            return isBox ? Formula::conj(a, b) : Formula::disj(a, b);
        }
        case ProgKind::Star: break;
    }
    throw ShapeError("interpret_into_L00: star program in " + render(f));
}

// ---- BCNF / BDNF ----
namespace {
bool atomicModal(Formula f, FKind k) {
    return f.kind() == k && f.prog().kind() == ProgKind::Atom && f.body().propositional();
}
void fixProg(std::optional<Program>& prog, Formula f) {
    if (!prog)
        prog = f.prog();
    else if (*prog != f.prog())
        throw ShapeError("shape mismatch: program " + render(f.prog()) + " differs from " + render(*prog) +
                         " in " + render(f));
}
}  // namespace

BcnfShape recognize_bcnf(Formula f) {
    auto rowsF = conjuncts(f);
    if (rowsF.size() == 1 && f.is_modal())
        throw ShapeError("shape mismatch: bare modality " + render(f) + " has no conjunction/disjunction structure");
    std::optional<Program> prog;
    BcnfShape out;
    for (auto row : rowsF) {
        BcnfRow r;
        std::vector<Formula> bs;
        for (auto d : disjuncts(row)) {
            if (d.propositional()) {
                bs.push_back(d);
            } else if (atomicModal(d, FKind::Dia)) {
                fixProg(prog, d);
                if (r.C) throw ShapeError("shape mismatch: second diamond " + render(d) + " in row " + render(row));
                r.C = d.body();
            } else if (atomicModal(d, FKind::Box)) {
                fixProg(prog, d);
                r.D.push_back(d.body());
            } else {
                throw ShapeError("shape mismatch: " + render(d) + " is not a literal-level BCNF disjunct");
            }
        }
        r.B = big_or(bs);
        out.rows.push_back(std::move(r));
    }
    out.prog = prog.value_or(Program::atom("p"));
    return out;
}

BdnfShape recognize_bdnf(Formula f) {
    std::optional<Program> prog;
    BdnfShape out;
    std::vector<Formula> fs;
    for (auto d : disjuncts(f)) {
        if (d.propositional()) {
            fs.push_back(d);
            continue;
        }
        std::vector<Formula> guard;
        std::optional<Formula> modal;
        for (auto c : conjuncts(d)) {
            if (c.propositional()) {
                guard.push_back(c);
            } else if (atomicModal(c, FKind::Box) || atomicModal(c, FKind::Dia)) {
                if (modal) throw ShapeError("shape mismatch: two modal conjuncts in " + render(d));
                fixProg(prog, c);
                modal = c;
            } else {
                throw ShapeError("shape mismatch: " + render(c) + " is not a BDNF conjunct");
            }
        }
        BdnfRow r{big_and(guard), modal->body()};
        (modal->is_box() ? out.boxRows : out.diaRows).push_back(std::move(r));
    }
    if (out.boxRows.empty()) throw ShapeError("shape mismatch: no [p]-row in " + render(f));
    if (out.diaRows.empty()) throw ShapeError("shape mismatch: no <p>-row in " + render(f));
    out.F = big_or(fs);
    out.prog = *prog;
    return out;
}

Formula bcnf_row_formula(Program p, const BcnfRow& r) {
    std::vector<Formula> ds;
    if (r.B) ds.push_back(*r.B);
    if (r.C) ds.push_back(Formula::dia(p, *r.C));
    for (auto d : r.D) ds.push_back(Formula::box(p, d));
    return or_all(ds);
}

Formula render_bcnf(const BcnfShape& s) {
    std::vector<Formula> rows;
    for (const auto& r : s.rows) rows.push_back(bcnf_row_formula(s.prog, r));
    return and_all(rows);
}

Formula render_bdnf(const BdnfShape& s) {
    std::vector<Formula> ds;
    if (s.F) ds.push_back(*s.F);
    auto row = [&](const BdnfRow& r, bool isBox) {
        Formula m = Formula::modal(isBox, s.prog, r.body);
        ds.push_back(r.guard ? Formula::conj(*r.guard, m) : m);
    };
    for (const auto& r : s.boxRows) row(r, true);
    for (const auto& r : s.diaRows) row(r, false);
    return or_all(ds);
}

namespace {
StarredExpr splitParts(const std::vector<Formula>& parts, const std::string& whole) {
    std::optional<StarredExpr> e;
    std::vector<Formula> rest;
    for (auto d : parts) {
        if (d.is_dia() && d.prog().kind() == ProgKind::Star && d.prog().body().kind() == ProgKind::Atom) {
            if (e) throw ShapeError("shape mismatch: two starred diamonds in " + whole);
            e = StarredExpr{d.prog().body(), d.body(), std::nullopt};
        } else if (d.propositional()) {
            rest.push_back(d);
        } else {
            throw ShapeError("shape mismatch: " + render(d) + " is neither <p*>A nor propositional");
        }
    }
    if (!e) throw ShapeError("shape mismatch: no <p*>A disjunct in " + whole);
    e->Z = big_or(rest);
    return *e;
}
}  // namespace

StarredExpr split_starred(Formula s) { return splitParts(disjuncts(s), render(s)); }
StarredExpr split_starred(const Sequent& s) {
    std::vector<Formula> parts;
    for (auto f : s)
        for (auto d : disjuncts(f)) parts.push_back(d);
    return splitParts(parts, render(s));
}
Formula render_starred(const StarredExpr& e) {
    Formula head = Formula::dia(Program::star(e.prog), e.A);
    return e.Z ? Formula::disj(head, *e.Z) : head;
}

}  // namespace pdl
