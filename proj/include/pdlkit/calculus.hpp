#pragma once
// Finite derivations, rule checking for Seq00/Seq0/Seq10/Seq1, the extended
// axiom, admissible transformations and p-inversion.
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "formula.hpp"
#include "ordinal.hpp"

namespace pdl {

enum class Rule { Ax, Or, And, DiaUnion, BoxUnion, DiaComp, BoxComp, DiaStar, Gen, Cut, Weak };
std::string rule_name(Rule r);
Rule rule_from_name(const std::string& s);

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
    Sequent seq;
    Rule rule = Rule::Ax;
    // Conclusion indices of principal formulas. Gen lists them in premise
    // order; modal decomposition rules carry one index.
    std::vector<int> principal;
    std::vector<DerivPtr> kids;
    Ordinal ord;
    std::optional<Formula> cut;  // Cut only: formula of the left premise
    int depth = 0;                // prefix length for upgraded and star rules
    int starPower = 0;            // m for DiaStar
};

// Builders assign the natural height (leaf 0, parent = max child + 1).
DerivPtr make_node(Sequent seq, Rule rule, std::vector<int> principal, std::vector<DerivPtr> kids,
                   std::optional<Formula> cut = std::nullopt, int depth = 0, int starPower = 0);
DerivPtr make_ax(Sequent seq);  // finds the literal pair
// Gen from the premise derivation: boxIndex selects the premise formula that
// gets the box; ctx is the extra context.
DerivPtr make_gen(DerivPtr premise, Program p, int boxIndex, const Sequent& ctx);
DerivPtr make_cut(DerivPtr left, DerivPtr right, Formula c, Sequent conclusion);
DerivPtr make_cut(DerivPtr left, DerivPtr right, Formula c);  // conclusion = max-union of contexts

std::size_t height(const DerivPtr& d);  // natural height
std::size_t node_count(const DerivPtr& d);
bool cut_free(const DerivPtr& d);
// Recompute natural heights bottom-up.
DerivPtr relabel(const DerivPtr& d);

nlohmann::json derivation_to_json(const DerivPtr& d);
DerivPtr derivation_from_json(const nlohmann::json& j);

enum class System { Seq00, Seq0, Seq10, Seq1 };
std::string system_name(System s);
System system_from_name(const std::string& s);
struct SystemSpec {
    System base = System::Seq0;
    bool cutAllowed = false;
    bool upgradedRules = false;
};

struct CheckResult {
    bool valid = true;
    std::string reason;
    DerivPtr node;  // first offending node
    explicit operator bool() const { return valid; }
};

CheckResult check(const SystemSpec& sys, const DerivPtr& d);
// Check and fill in principal/depth annotations (throws ShapeError on invalid).
DerivPtr annotate(const SystemSpec& sys, const DerivPtr& d);

DerivPtr extended_axiom(Formula f, const Sequent& ctx);

// Admissible transformations. Inputs are annotated; the cut elimination
// engine also passes derivations whose cuts sit above the target.
enum class Transform { W, C, OrInv, AndInv1, AndInv2, DiaUnionInv, BoxUnionInv1, BoxUnionInv2, DiaCompInv, BoxCompInv, GenVec };
std::string transform_name(Transform t);
Transform transform_from_name(const std::string& s);

DerivPtr weaken(const DerivPtr& d, const Sequent& extra);
DerivPtr contract(const DerivPtr& d, Formula a);
DerivPtr or_inv(const DerivPtr& d, Formula target);
DerivPtr and_inv(const DerivPtr& d, Formula target, int side);  // side 1 or 2
// Modal inversions at a given prefix depth (number of leading modalities
// before the decomposed program). depth < 0 picks the smallest valid depth.
DerivPtr dia_union_inv(const DerivPtr& d, Formula target, int depth = -1);
DerivPtr box_union_inv(const DerivPtr& d, Formula target, int side, int depth = -1);
DerivPtr dia_comp_inv(const DerivPtr& d, Formula target, int depth = -1);
DerivPtr box_comp_inv(const DerivPtr& d, Formula target, int depth = -1);
// Iterated Gen: programs P_1..P_k, one column per program; cols[j][i] = 1 marks
// the premise formula i that gets the box at level j.
DerivPtr gen_vec(const DerivPtr& d, const std::vector<Program>& progs, const std::vector<std::vector<int>>& cols,
                 const Sequent& ctx);

struct TransformArgs {
    std::optional<Formula> target;
    Sequent extra;  // W
    int depth = -1;
    std::vector<Program> progs;             // GenVec
    std::vector<std::vector<int>> columns;  // GenVec
};
DerivPtr apply_transform(Transform t, const DerivPtr& d, const TransformArgs& args);

// Result of p-inversion.
struct PInvResult {
    bool side = true;  // derivation of the side context
    int boxIndex = -1;
    DerivPtr deriv;
};
PInvResult p_invert(const DerivPtr& d, Program p);

// Node with principal data re-inferred from its premises; throws
// std::logic_error when no rule instance matches.
DerivPtr infer_node(Sequent seq, Rule rule, std::vector<DerivPtr> kids, std::optional<Formula> cut = std::nullopt);

// Replace one occurrence of `target` by `repl` in the endsequent, following
// its non-principal predecessors upward. Where every occurrence is
// principal, `onPrincipal(node, index)` supplies the replacement subtree.
using PrincipalHandler = std::function<DerivPtr(const DerivPtr&, int)>;
DerivPtr ascend_occurrence(const DerivPtr& d, Formula target, const Sequent& repl, const PrincipalHandler& onPrincipal);

// Decomposition helpers shared with the cut-elimination engine.
struct ModalPrefix {
    std::vector<Program> progs;  // leading programs, outermost first
    Formula rest;
};
// Strip the first `depth` modalities (all of kind box or all diamond).
std::optional<ModalPrefix> strip_prefix(Formula f, int depth, bool boxes);
Formula add_prefix(const std::vector<Program>& progs, bool boxes, Formula f);

}  // namespace pdl
