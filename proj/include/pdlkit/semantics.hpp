#pragma once
// Finite Kripke frames and the semantic oracle.
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "formula.hpp"

namespace pdl {

struct KripkeFrame {
    int worlds = 0;
    std::map<std::string, std::vector<std::pair<int, int>>> access;
    std::map<std::string, std::set<int>> valuation;

    int add_world() { return worlds++; }
    void add_edge(const std::string& prog, int u, int v) { access[prog].emplace_back(u, v); }
    void set_true(const std::string& var, int w) { valuation[var].insert(w); }
};

nlohmann::json frame_to_json(const KripkeFrame& f);
KripkeFrame frame_from_json(const nlohmann::json& j);

// Global model checker over one frame; truth sets are memoized per subformula.
class Evaluator {
public:
    using Rel = std::vector<std::vector<char>>;
    explicit Evaluator(const KripkeFrame& frame);
    bool holds(int world, Formula f);
    const std::vector<char>& truth(Formula f);
    const Rel& relation(Program p);

private:
    const KripkeFrame& frame_;
    std::unordered_map<std::uint64_t, std::vector<char>> truth_;
    std::unordered_map<std::uint64_t, Rel> rel_;
};

bool eval(const KripkeFrame& frame, int world, Formula f);

struct Verdict {
    bool valid = true;
    bool authoritative = false;
    std::optional<KripkeFrame> frame;  // countermodel
    int world = 0;
};

// Search for a world falsifying every member of the sequent. For star-free
// input a tableau builds tree frames with depth <= depthBound and at most
// sizeBound successors per program at each world; for starred input all
// frames with at most sizeBound worlds are enumerated.
Verdict sequent_valid_bounded(const Sequent& s, int sizeBound, int depthBound);
// Star-free input with bounds large enough to be authoritative.
Verdict sequent_valid(const Sequent& s);
// Bounds that make a star-free search authoritative.
std::pair<int, int> authoritative_bounds(const Sequent& s);

bool taut_check(Formula y);

// Search for a frame whose worlds carry candidate valuations (each a set of
// true variables), with a root satisfying `rootProp` and every world
// reachable over p satisfying `invariant` (modal depth <= 1, modalities over
// p only). Candidates are eliminated to a greatest fixpoint; for worlds
// restricted to the candidates the answer is exact. A found frame is
// re-verified by the evaluator.
struct ClosureResult {
    bool found = false;
    KripkeFrame frame;
    int world = 0;
    std::size_t states = 0;
    std::size_t alive = 0;
};
ClosureResult closure_search(Formula invariant, std::optional<Formula> rootProp, Program prog,
                             const std::vector<std::set<std::string>>& candidates);

// Exact check of <p*>A | Z for A of modal depth <= 1 over the single atomic
// program p: closure search over all valuations of the occurring variables.
// Countermodels are re-verified by the evaluator.
Verdict star_closure_valid(Formula body, std::optional<Formula> z, Program prog);

}  // namespace pdl
