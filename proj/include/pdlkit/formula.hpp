#pragma once
// Programs, seq-formulas and sequents. Nodes are hash-consed, so equality is
// pointer equality and copies are one word.
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace pdl {

enum class ProgKind : std::uint8_t { Atom, Comp, Union, Star };
enum class FKind : std::uint8_t { Lit, Or, And, Box, Dia };

struct ProgNode;
struct FNode;

class Program {
public:
    Program() = default;
    static Program atom(std::string_view name);
    static Program comp(Program l, Program r);
    static Program uni(Program l, Program r);
    static Program star(Program b);

    ProgKind kind() const;
    const std::string& name() const;  // Atom only
    Program left() const;             // Comp/Union
    Program right() const;
    Program body() const;  // Star
    bool has_star() const;
    std::size_t plain_complexity() const;
    std::uint64_t id() const;
    bool valid() const { return n_ != nullptr; }

    friend bool operator==(Program a, Program b) { return a.n_ == b.n_; }
    friend std::strong_ordering operator<=>(Program a, Program b) { return a.id() <=> b.id(); }

private:
    explicit Program(const ProgNode* n) : n_(n) {}
    const ProgNode* n_ = nullptr;
    friend struct Registry;
    friend class Formula;
};

class Formula {
public:
    Formula() = default;
    static Formula lit(std::string_view var, bool positive = true);
    static Formula disj(Formula l, Formula r);
    static Formula conj(Formula l, Formula r);
    static Formula box(Program p, Formula body);
    static Formula dia(Program p, Formula body);
    static Formula modal(bool isBox, Program p, Formula body) { return isBox ? box(p, body) : dia(p, body); }

    FKind kind() const;
    const std::string& var() const;  // Lit
    bool positive() const;           // Lit
    Formula left() const;            // Or/And
    Formula right() const;
    Program prog() const;  // Box/Dia
    Formula body() const;
    Formula negate() const;  // seq-negation, O(1)

    bool is_lit() const { return kind() == FKind::Lit; }
    bool is_modal() const { return kind() == FKind::Box || kind() == FKind::Dia; }
    bool is_box() const { return kind() == FKind::Box; }
    bool is_dia() const { return kind() == FKind::Dia; }

    std::size_t plain_complexity() const;  // literals + Or/And + program connectives
    std::size_t size() const;              // plain complexity + one per modality
    std::size_t modal_depth() const;
    bool has_star() const;
    bool propositional() const;
    bool atomic_programs() const;  // every program is an Atom
    std::uint64_t id() const;
    bool valid() const { return n_ != nullptr; }

    friend bool operator==(Formula a, Formula b) { return a.n_ == b.n_; }
    friend std::strong_ordering operator<=>(Formula a, Formula b) { return a.id() <=> b.id(); }

private:
    explicit Formula(const FNode* n) : n_(n) {}
    const FNode* n_ = nullptr;
    friend struct Registry;
};

struct FormulaHash {
    std::size_t operator()(Formula f) const { return std::hash<std::uint64_t>{}(f.id()); }
};

using Sequent = std::vector<Formula>;

// Boolean constants, macro-expanded over a reserved variable.
Formula verum();
Formula falsum();
// Left-associated disjunction/conjunction; empty list yields nullopt.
std::optional<Formula> big_or(const std::vector<Formula>& fs);
std::optional<Formula> big_and(const std::vector<Formula>& fs);
// Like big_or/big_and but empty lists map to falsum/verum.
Formula or_all(const std::vector<Formula>& fs);
Formula and_all(const std::vector<Formula>& fs);
// Flatten nested Or (resp. And) nodes into their operands, left to right.
std::vector<Formula> disjuncts(Formula f);
std::vector<Formula> conjuncts(Formula f);

Formula seq_negate(Formula f);
std::size_t plain_complexity(Formula f);
std::size_t plain_complexity(Program p);
std::size_t sequent_size(const Sequent& s);

// Multiset helpers.
bool multiset_equal(Sequent a, Sequent b);
bool multiset_subset(Sequent a, Sequent b);  // a ⊆ b as multisets
Sequent multiset_minus(const Sequent& a, const Sequent& b);  // a ∖ b (ignoring missing)
std::size_t count_of(const Sequent& s, Formula f);
Sequent concat(Sequent a, const Sequent& b);

// Parsing and rendering.
Formula parse_formula(std::string_view text);
Sequent parse_sequent(std::string_view text);
Program parse_program(std::string_view text);
std::string render(Formula f);
std::string render(Program p);
std::string render(const Sequent& s);

// Variables and programs occurring.
std::set<std::string> variables(Formula f);
std::set<std::string> variables(const Sequent& s);
std::set<std::string> atomic_programs_of(Formula f);

// Fragments.
enum class Fragment { LEmpty, L00, L0, FOR10, FOR1 };
std::string fragment_name(Fragment f);
std::set<Fragment> classify_fragment(Formula f);
bool in_fragment(Formula f, Fragment fr);
bool in_fragment(const Sequent& s, Fragment fr);

Formula interpret_into_L00(Formula f);

// Normal-form shapes.
struct BcnfRow {
    std::optional<Formula> B;
    std::optional<Formula> C;
    std::vector<Formula> D;
    friend bool operator==(const BcnfRow&, const BcnfRow&) = default;
};
struct BcnfShape {
    Program prog;
    std::vector<BcnfRow> rows;
    friend bool operator==(const BcnfShape&, const BcnfShape&) = default;
};
struct BdnfRow {
    std::optional<Formula> guard;  // F_i / F_j
    Formula body;                  // G_i / H_j
    friend bool operator==(const BdnfRow&, const BdnfRow&) = default;
};
struct BdnfShape {
    Program prog;
    std::optional<Formula> F;
    std::vector<BdnfRow> boxRows;
    std::vector<BdnfRow> diaRows;
    friend bool operator==(const BdnfShape&, const BdnfShape&) = default;
};

BcnfShape recognize_bcnf(Formula f);
BdnfShape recognize_bdnf(Formula f);
Formula render_bcnf(const BcnfShape& s);
Formula render_bdnf(const BdnfShape& s);
// One BCNF row as a formula, and as a sequent (absent parts dropped).
Formula bcnf_row_formula(Program p, const BcnfRow& r);

// A starred expression <p*>A | Z, with Z optional.
struct StarredExpr {
    Program prog;  // atomic p
    Formula A;
    std::optional<Formula> Z;
};
StarredExpr split_starred(Formula s);
StarredExpr split_starred(const Sequent& s);
Formula render_starred(const StarredExpr& e);

}  // namespace pdl
