#include "pdlkit/ordinal.hpp"

#include <cctype>

namespace pdl {

namespace {
const std::vector<VeblenTerm>& emptyTerms() {
    static const std::vector<VeblenTerm> e;
    return e;
}

// Compare principal parts phi(a1,b1) and phi(a2,b2), coefficients ignored.
std::strong_ordering cmpPrincipal(const VeblenTerm& x, const VeblenTerm& y);

Ordinal single(const VeblenTerm& t) {
    VeblenTerm u = t;
    u.coeff = 1;
    return Ordinal::from_terms({u});
}

std::strong_ordering cmpPrincipal(const VeblenTerm& x, const VeblenTerm& y) {
    auto c = compare(x.a, y.a);
    if (c == 0) return compare(x.b, y.b);
    // smaller index: phi(a1,b1) < phi(a2,b2) iff b1 < phi(a2,b2)
    if (c < 0) return compare(x.b, single(y)) < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    return compare(single(x), y.b) < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}
}  // namespace

Ordinal Ordinal::from_terms(std::vector<VeblenTerm> ts) {
    Ordinal o;
    if (!ts.empty()) o.t_ = std::make_shared<const std::vector<VeblenTerm>>(std::move(ts));
    return o;
}
Ordinal Ordinal::nat(std::uint64_t n) {
    if (n == 0) return {};
    return from_terms({VeblenTerm{Ordinal{}, Ordinal{}, n}});
}
Ordinal Ordinal::omega() { return from_terms({VeblenTerm{Ordinal{}, nat(1), 1}}); }
const std::vector<VeblenTerm>& Ordinal::terms() const { return t_ ? *t_ : emptyTerms(); }
bool Ordinal::is_finite() const {
    return is_zero() || (terms().size() == 1 && terms()[0].a.is_zero() && terms()[0].b.is_zero());
}
std::uint64_t Ordinal::finite_value() const { return is_zero() ? 0 : terms()[0].coeff; }
bool Ordinal::is_principal() const { return terms().size() == 1 && terms()[0].coeff == 1; }

std::strong_ordering compare(const Ordinal& a, const Ordinal& b) {
    const auto& x = a.terms();
    const auto& y = b.terms();
    std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto c = cmpPrincipal(x[i], y[i]);
        if (c != 0) return c;
        if (x[i].coeff != y[i].coeff) return x[i].coeff <=> y[i].coeff;
    }
    return x.size() <=> y.size();
}
bool operator==(const Ordinal& a, const Ordinal& b) { return compare(a, b) == 0; }
std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) { return compare(a, b); }

Ordinal nat_sum(const Ordinal& a, const Ordinal& b) {
    const auto& x = a.terms();
    const auto& y = b.terms();
    std::vector<VeblenTerm> out;
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size()) {
            out.push_back(x[i++]);
            continue;
        }
        if (i == x.size()) {
            out.push_back(y[j++]);
            continue;
        }
        auto c = cmpPrincipal(x[i], y[j]);
        if (c > 0) {
            out.push_back(x[i++]);
        } else if (c < 0) {
            out.push_back(y[j++]);
        } else {
            VeblenTerm t = x[i++];
            t.coeff += y[j++].coeff;
            out.push_back(t);
        }
    }
    return Ordinal::from_terms(std::move(out));
}

Ordinal ord_sum(const Ordinal& a, const Ordinal& b) {
    if (b.is_zero()) return a;
    const auto& lead = b.terms().front();
    std::vector<VeblenTerm> out;
    std::uint64_t carry = 0;
    for (const auto& t : a.terms()) {
        auto c = cmpPrincipal(t, lead);
        if (c > 0)
            out.push_back(t);
        else if (c == 0)
            carry = t.coeff;
        else
            break;
    }
    bool first = true;
    for (const auto& t : b.terms()) {
        VeblenTerm u = t;
        if (first) u.coeff += carry;
        first = false;
        out.push_back(u);
    }
    return Ordinal::from_terms(std::move(out));
}

Ordinal succ(const Ordinal& a) { return ord_sum(a, Ordinal::nat(1)); }

Ordinal veblen(const Ordinal& a, const Ordinal& b) {
    if (b.is_principal() && compare(b.terms()[0].a, a) > 0) return b;
    return Ordinal::from_terms({VeblenTerm{a, b, 1}});
}
Ordinal omega_pow(const Ordinal& a) { return veblen(Ordinal{}, a); }

Ordinal leading_degree(const Ordinal& a) {
    if (a.is_zero()) return {};
    const auto& t = a.terms().front();
    if (t.a.is_zero()) return t.b;
    return single(t);
}
Ordinal times_omega(const Ordinal& a) { return omega_pow(succ(leading_degree(a))); }
Ordinal max(const Ordinal& a, const Ordinal& b) { return compare(a, b) < 0 ? b : a; }
Ordinal phi_omega_zero() { return veblen(Ordinal::omega(), Ordinal{}); }

// ---- text ----
namespace {
bool simpleExponent(const Ordinal& e) {
    if (e.is_finite()) return true;
    if (!e.is_principal()) return false;
    const auto& t = e.terms()[0];
    return !t.a.is_zero() || e == Ordinal::omega();
}
}  // namespace

std::string render(const Ordinal& a) {
    if (a.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : a.terms()) {
        if (!first) out += " + ";
        first = false;
        if (t.a.is_zero() && t.b.is_zero()) {
            out += std::to_string(t.coeff);
            continue;
        }
        if (t.a.is_zero()) {
            if (t.b == Ordinal::nat(1)) {
                out += "w";
            } else {
                out += "w^";
                bool paren = !simpleExponent(t.b);
                if (paren) out += '(';
                out += render(t.b);
                if (paren) out += ')';
            }
        } else {
            out += "phi(" + render(t.a) + "," + render(t.b) + ")";
        }
        if (t.coeff > 1) out += "*" + std::to_string(t.coeff);
    }
    return out;
}

namespace {
class OrdParser {
public:
    explicit OrdParser(std::string_view t) : s_(t) {}
    Ordinal run() {
        Ordinal o = sum();
        skip();
        if (i_ != s_.size()) fail("trailing input");
        return o;
    }

private:
    std::string_view s_;
    std::size_t i_ = 0;
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    bool eatWord(std::string_view w) {
        skip();
        if (s_.substr(i_, w.size()) == w) {
            i_ += w.size();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& m) { throw ParseError("ordinal syntax error: " + m, i_); }
    std::uint64_t number() {
        skip();
        std::size_t st = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (st == i_) fail("expected number");
        return std::stoull(std::string(s_.substr(st, i_ - st)));
    }
    Ordinal sum() {
        Ordinal o = term();
        while (eat('+')) o = ord_sum(o, term());
        return o;
    }
    Ordinal term() {
        bool isW = false;
        Ordinal base = atom(isW);
        if (eat('^')) {
            if (!isW) fail("'^' needs base w");
            bool dummy = false;
            base = omega_pow(atom(dummy));
        }
        if (eat('*')) {
            std::uint64_t c = number();
            Ordinal acc;
            for (std::uint64_t k = 0; k < c; ++k) acc = ord_sum(acc, base);
            base = acc;
        }
        return base;
    }
    Ordinal atom(bool& isW) {
        skip();
        if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) return Ordinal::nat(number());
        if (eatWord("phi")) {
            if (!eat('(')) fail("expected '('");
            Ordinal a = sum();
            if (!eat(',')) fail("expected ','");
            Ordinal b = sum();
            if (!eat(')')) fail("expected ')'");
            return veblen(a, b);
        }
        if (eatWord("e0")) return veblen(Ordinal::nat(1), Ordinal{});
        if (eat('w')) {
            isW = true;
            return Ordinal::omega();
        }
        if (eat('(')) {
            Ordinal o = sum();
            if (!eat(')')) fail("expected ')'");
            return o;
        }
        fail("expected ordinal atom");
    }
};
}  // namespace

Ordinal parse_ordinal(std::string_view text) { return OrdParser(text).run(); }

// ---- ordinal complexity ----
Ordinal o_complexity(Program p) {
    switch (p.kind()) {
        case ProgKind::Atom: return {};
        case ProgKind::Union: return succ(max(o_complexity(p.left()), o_complexity(p.right())));
        case ProgKind::Comp: return succ(nat_sum(o_complexity(p.left()), o_complexity(p.right())));
        case ProgKind::Star: return times_omega(o_complexity(p.body()));
    }
    return {};
}

Ordinal o_complexity(Formula f) {
    switch (f.kind()) {
        case FKind::Lit: return {};
        case FKind::Or:
        case FKind::And: return succ(max(o_complexity(f.left()), o_complexity(f.right())));
        default: return succ(nat_sum(o_complexity(f.prog()), o_complexity(f.body())));
    }
}

Ordinal o_complexity(const Sequent& s) {
    Ordinal acc;
    for (auto f : s) acc = nat_sum(acc, o_complexity(f));
    return acc;
}

}  // namespace pdl
