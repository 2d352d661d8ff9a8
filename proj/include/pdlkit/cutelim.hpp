#pragma once
// Cut degree and elimination for finite derivations with star-free cuts.
#include <string>
#include <vector>

#include <json.hpp>

#include "calculus.hpp"
#include "ordinal.hpp"

namespace pdl {

// max{0, o(C)+1 over cut formulas C}
Ordinal deg(const DerivPtr& d);

// One reduction step record.
struct ReductionStep {
    Formula cut;
    std::string reductionCase;  // "literal", "boolean", "union", "composition", "modal"
    Ordinal degBefore, degAfter;
    Ordinal h1, h2, hOut;
    Ordinal heightBound;  // h1 # h2 + w
    bool boundHolds = false;
    bool descends = false;
};

struct EliminationReport {
    Ordinal degIn;
    Ordinal alpha;                    // least b with deg < w^b
    std::vector<Ordinal> alphaParts;  // Cantor normal form exponents of w^alpha
    Ordinal hIn, hOut;
    Ordinal bound;                    // phi(alpha, hIn)
    bool boundHolds = false;
    bool belowPhiOmega = false;       // bound < phi(w, 0)
    std::vector<ReductionStep> steps;
};

// Reduce a lowermost cut whose premises are both cut-free. The result has
// the same endsequent and strictly smaller degree.
DerivPtr reduce_cut(const DerivPtr& d);
DerivPtr eliminate(const DerivPtr& d, EliminationReport* report = nullptr);

nlohmann::json report_to_json(const EliminationReport& r);

}  // namespace pdl
