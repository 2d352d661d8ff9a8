#pragma once
// BDNF bodies: DeMorgan conversion to BCNF, the boolean recursion f deciding
// the starred expression, its unrolling into a quantified boolean formula,
// and QDIMACS export.
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "formula.hpp"

namespace pdl {

// One conjunct R_xi of the converted body; xi[k] in {1,2} for k < s+t, box
// rows first.
struct XiRow {
    std::vector<int> xi;
    std::optional<Formula> B;
    std::optional<Formula> C;
    std::vector<int> J;  // 1-based box-row indices with xi = 2
    std::vector<Formula> D;
};

struct ConvertedBcnf {
    Program prog;
    int s = 0;
    int t = 0;
    std::vector<XiRow> rows;

    BcnfShape shape() const;
    int n() const;  // sum of |J_xi|
};

// A guard that is absent counts as the constant 1, so selecting it makes
// B_xi the constant 1.
ConvertedBcnf bdnf_to_bcnf(const BdnfShape& a);

// f(i, X) over the rows of a BCNF; X absent means the empty disjunction.
class FRecursion {
public:
    explicit FRecursion(BcnfShape r) : r_(std::move(r)) {}
    bool operator()(int i, std::optional<Formula> x);
    std::size_t memo_size() const { return memo_.size(); }
    std::size_t taut_calls() const { return tautCalls_; }

private:
    bool taut(const std::vector<std::optional<Formula>>& parts);
    BcnfShape r_;
    std::map<std::pair<int, std::uint64_t>, bool> memo_;
    std::map<std::uint64_t, bool> taut_;
    std::size_t tautCalls_ = 0;
};
bool f_eval(int i, std::optional<Formula> x, const BcnfShape& r);

struct BdneInstance {
    BdnfShape shape;
    Formula body;
    std::optional<Formula> Z;
};
BdneInstance bdne_instance(Formula s);
BdneInstance bdne_instance(const Sequent& s);

enum class Via { F, Expansion, Qbf };
std::string via_name(Via v);
Via via_from_name(const std::string& s);

struct BdneDecision {
    bool valid = false;
    int n = 0;
    std::size_t xiCount = 0;
    ConvertedBcnf converted;
};
BdneDecision decide_bdne(const BdneInstance& inst, Via via = Via::F);
bool decide_bdne(Formula s, Via via = Via::F);

// AND/OR DAG over universally closed propositional matrices.
struct QbfFormula {
    enum class Kind { And, Or, Leaf };
    struct Node {
        Kind kind = Kind::Leaf;
        std::vector<int> kids;
        Formula matrix;                 // Leaf
        std::vector<std::string> vars;  // Leaf: exactly the variables of the matrix
    };
    std::vector<Node> nodes;
    int root = -1;

    // Symbols of the shared representation: one per gate plus one per edge,
    // matrix size plus one per bound variable at leaves.
    std::size_t dag_size() const;
    // Size of the same formula written out as a tree.
    long double tree_size() const;
    std::size_t leaf_count() const;
};

QbfFormula emit_qbf(const BcnfShape& r, std::optional<Formula> z, int depth);
QbfFormula emit_qbf(const BdneInstance& inst);
// Leaves are decided by enumerating assignments (BoundError past 24 variables).
bool qbf_eval(const QbfFormula& q);
nlohmann::json qbf_to_json(const QbfFormula& q);

struct QdimacsExport {
    std::string text;
    int universals = 0;
    int gates = 0;
    std::size_t clauses = 0;
};
// Leaves get disjoint variable copies, so the prefix is one universal block
// followed by the existential Tseitin gates. Throws BoundError over budget.
QdimacsExport export_qdimacs(const QbfFormula& q, std::size_t clauseBudget = 1'000'000);
// Decide a QDIMACS text of that shape (forall block, then exists block of
// functionally defined gates) by enumerating the universal block and unit
// propagating. Throws BoundError past `maxUniversals`.
bool check_qdimacs(const std::string& text, int maxUniversals = 20);

}  // namespace pdl
