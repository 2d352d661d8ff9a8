#pragma once
// Deterministic proof search for Seq00 following the priority order
// (disjunctions, then conjunctions, then the purely modal step).
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "calculus.hpp"

namespace pdl {

enum class SearchKind { AxLeaf, FailLeaf, OrStep, AndStep, GenStep, WeakStep, Choice };
std::string search_kind_name(SearchKind k);

// The full search tree. A Choice node is the OR gate of a branching modal
// step: its children are one GenStep and one WeakStep for the chosen box.
struct SearchTree {
    Sequent seq;
    SearchKind kind = SearchKind::FailLeaf;
    int choice = -1;  // index of the chosen box for Gen/Weak/Choice
    std::vector<SearchTree> kids;
};

struct TraceStep {
    Sequent seq;
    std::string step;  // "or", "and1", "and2", "gen", "weak", "fail"
};

struct ProveStats {
    std::size_t peakPath = 0;       // deepest recursion
    std::size_t peakSequent = 0;    // longest sequent on the path
    std::size_t depthBound = 0;     // bound the search was checked against
    std::size_t nodes = 0;
};

struct ProveResult {
    bool proved = false;
    DerivPtr deriv;                  // when proved
    std::vector<TraceStep> trace;    // when refuted: one failing path
    ProveStats stats;
    std::string trace_string() const;  // compact path encoding
};

// Seq0 input additionally decomposes top-level union/composition modalities
// (all invertible) before the modal step. With `memo`, verdicts and
// subderivations are shared across identical sequents (the result is then a
// DAG and the single-path space discipline no longer applies).
ProveResult prove(const Sequent& s, System sys = System::Seq00, bool memo = false);
bool provable(const Sequent& s);
SearchTree build_search_tree(const Sequent& s);
bool eval_tree(const SearchTree& t);  // AND/OR/ID gate semantics
bool eval_circuit(const Sequent& s);
std::size_t search_depth_bound(const Sequent& s);

nlohmann::json search_tree_to_json(const SearchTree& t);
nlohmann::json trace_to_json(const std::vector<TraceStep>& t);

}  // namespace pdl
