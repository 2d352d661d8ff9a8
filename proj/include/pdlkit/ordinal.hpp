#pragma once
// Ordinal notations below phi(w,0): descending sums of Veblen terms phi(a,b)*c.
#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "formula.hpp"

namespace pdl {

struct VeblenTerm;

class Ordinal {
public:
    Ordinal() = default;  // zero
    static Ordinal nat(std::uint64_t n);
    static Ordinal omega();

    const std::vector<VeblenTerm>& terms() const;
    bool is_zero() const { return !t_ || t_->empty(); }
    bool is_finite() const;
    std::uint64_t finite_value() const;  // requires is_finite
    // Single principal term with coefficient 1.
    bool is_principal() const;

    friend bool operator==(const Ordinal& a, const Ordinal& b);
    friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);

    static Ordinal from_terms(std::vector<VeblenTerm> ts);

private:
    std::shared_ptr<const std::vector<VeblenTerm>> t_;
};

struct VeblenTerm {
    Ordinal a;  // Veblen index
    Ordinal b;  // argument
    std::uint64_t coeff = 1;
};

std::strong_ordering compare(const Ordinal& a, const Ordinal& b);

Ordinal nat_sum(const Ordinal& a, const Ordinal& b);
Ordinal ord_sum(const Ordinal& a, const Ordinal& b);
Ordinal succ(const Ordinal& a);
Ordinal omega_pow(const Ordinal& a);
Ordinal veblen(const Ordinal& a, const Ordinal& b);
Ordinal times_omega(const Ordinal& a);  // nonzero input
Ordinal max(const Ordinal& a, const Ordinal& b);
// Exponent of the leading term seen as w^d (0 for zero).
Ordinal leading_degree(const Ordinal& a);
// phi(w,0), the toolkit's sentinel bound.
Ordinal phi_omega_zero();

std::string render(const Ordinal& a);
Ordinal parse_ordinal(std::string_view text);

Ordinal o_complexity(Program p);
Ordinal o_complexity(Formula f);
Ordinal o_complexity(const Sequent& s);

}  // namespace pdl
