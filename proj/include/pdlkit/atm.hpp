#pragma once
// Alternating Turing machines with a fixed tape window: the PDL formula
// whose models are accepting computations, its negation as a BDNF-starred
// expression, a direct simulator and a bounded model search.
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "formula.hpp"

namespace pdl {

struct AtmMove {
    std::string state;
    std::string write;
    int dir = 0;  // -1, 0, +1
    friend bool operator==(const AtmMove&, const AtmMove&) = default;
};

// Cells 0..space+1; cell 0 holds the left endmarker "lm", cell space+1 the
// right endmarker "rm". Both endmarkers are implicit tape symbols. State names
// "l" and "r" are reserved for the head-position annotations.
struct AtmSpec {
    std::vector<std::string> alphabet;  // work symbols, blank included
    std::string blank;
    std::vector<std::string> states;
    std::string start;
    std::set<std::string> universal;
    std::set<std::string> existential;
    std::map<std::pair<std::string, std::string>, std::vector<AtmMove>> delta;  // (state, symbol)
    std::vector<std::string> input;
    int space = 1;

    std::vector<std::string> tape_symbols() const;  // alphabet + endmarkers
    const std::vector<AtmMove>& moves(const std::string& q, const std::string& a) const;
};

inline const std::string kLeftEnd = "lm";
inline const std::string kRightEnd = "rm";

void validate(const AtmSpec& m);  // throws ShapeError
AtmSpec atm_from_json(const nlohmann::json& j);
nlohmann::json atm_to_json(const AtmSpec& m);

// Variable names used by the encoding.
std::string symbol_var(int cell, const std::string& a);
std::string state_var(int cell, const std::string& q);
inline const std::string kAcceptVar = "Acc";
inline const std::string kNextProgram = "Next";

struct EncodeOptions {
    // Assert the right endmarker positively instead of its negation.
    bool repairEndmarkers = false;
    // Keep off-head cells when the head is left or right of them; the literal
    // guard (both annotations at once) never fires.
    bool repairMove = false;
};

struct AcceptsFormula {
    Formula start;
    std::vector<Formula> config;  // conjuncts
    std::vector<Formula> move;
    std::vector<Formula> acceptance;
    Formula invariant;  // Config & Move & Acceptance
    Formula formula;    // Acc & Start & [Next*]invariant
};
AcceptsFormula encode_accepts(const AtmSpec& m, const EncodeOptions& opts = {});

struct NegationBdne {
    BdnfShape A;
    Formula Z;
    Formula formula;  // <Next*>A | Z
    std::size_t alphaRows = 0;
    std::size_t betaRows = 0;
    std::size_t gammaRows = 0;
};
NegationBdne encode_negation_bdne(const AtmSpec& m, const EncodeOptions& opts = {});

enum class AtmVerdict { Accepts, Rejects, Bound };
std::string verdict_name(AtmVerdict v);

struct Simulation {
    AtmVerdict verdict = AtmVerdict::Bound;
    std::size_t configs = 0;
    bool cyclic = false;
};
// Least-fixpoint alternating acceptance: a halting universal configuration
// accepts, a halting existential one rejects, infinite runs reject.
Simulation simulate_atm(const AtmSpec& m, std::size_t maxConfigs = 100000);

// Satisfiability of the acceptance formula over frames whose worlds are
// configurations (every valuation satisfying Config is one), each with
// either Acc value. Throws BoundError past maxStates candidates.
struct ModelSearch {
    bool satisfiable = false;
    std::size_t candidates = 0;
    std::size_t worlds = 0;  // of the witness frame
};
ModelSearch accepts_model_search(const AtmSpec& m, const EncodeOptions& opts = {}, std::size_t maxStates = 200000);

}  // namespace pdl
