#pragma once
// Star elimination by finite expansion: <p*>A, Pi becomes A, <p>A, ..., <p>^k A, Pi.
// For BCNF bodies k = n+1 suffices, n being the total box count.
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "formula.hpp"

namespace pdl {

// A, <p>A, ..., <p>^k A followed by pi.
Sequent expand(Formula body, const Sequent& pi, int k, Program prog = Program::atom("p"));

int bcnf_bound(const BcnfShape& shape);

// <p*>A | Z split into a BCNF shape and the context {Z} (empty without Z).
struct BcneInstance {
    BcnfShape shape;
    Formula body;
    Sequent pi;
};
// Accepts a bare atomic modality as a one-row body. Throws ShapeError.
BcneInstance bcne_instance(const Sequent& s);
BcneInstance bcne_instance(Formula s);

struct BcneDecision {
    bool valid = false;
    int bound = 0;      // n
    Sequent expansion;  // Sigma-hat at n+1
};
BcneDecision decide_bcne(const BcneInstance& inst);
bool decide_bcne(const Sequent& s);
bool decide_bcne(Formula s);

// Smallest k <= cap whose expansion is provable.
std::optional<int> min_expansion_k(Formula body, const Sequent& pi, int cap, Program prog = Program::atom("p"));

// Labelled tree witnessing that the k-th expansion is not derivable.
struct RefutationTree {
    enum class Role { Root, Son, Daughter };
    Role role = Role::Root;
    Sequent label;
    int row = -1;  // chosen row at inner nodes
    std::vector<RefutationTree> kids;  // son first, then daughters in box order
};

std::optional<RefutationTree> build_refutation_tree(const BcnfShape& shape, const Sequent& pi, int k);

struct RefutationCheck {
    bool ok = true;
    std::string reason;
    explicit operator bool() const { return ok; }
};
// Conditions 1-3; `everyNode` additionally requires every label unprovable
// (the starred condition), otherwise only sons and leaves are checked.
RefutationCheck verify_refutation_tree(const RefutationTree& t, const BcnfShape& shape, const Sequent& pi, int k,
                                       bool everyNode = true);

// T_s -> T_{s+1}: along each path, the first daughter whose label repeats an
// earlier daughter label gets a copy of the subtree at the earliest repeat;
// the result is cut to height s+2. Throws BoundError when some path has no
// repeat (possible only for s < n).
RefutationTree pump(const RefutationTree& t, int s);

int tree_height(const RefutationTree& t);
nlohmann::json refutation_to_json(const RefutationTree& t);

}  // namespace pdl
