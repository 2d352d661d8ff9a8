#pragma once
// Random and exhaustive generators shared by the unit tests and the
// acceptance runner.
#include <random>
#include <string>
#include <vector>

#include "pdlkit/formula.hpp"

namespace pdl::testgen {

struct Gen {
    std::mt19937_64 rng;
    std::vector<std::string> vars{"x", "y", "z"};
    std::vector<std::string> progs{"p", "q"};
    bool starFree = true;
    bool compoundPrograms = false;  // allow ; and + inside modalities

    explicit Gen(std::uint64_t seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

    Formula literal() { return Formula::lit(vars[pick(static_cast<int>(vars.size()))], coin()); }
    Formula propositional(int size) {
        if (size <= 1) return literal();
        int l = 1 + pick(size - 1);
        Formula a = propositional(l), b = propositional(std::max(1, size - 1 - l));
        return coin() ? Formula::disj(a, b) : Formula::conj(a, b);
    }
    Program program(int size) {
        if (size <= 1 || !compoundPrograms) return Program::atom(progs[pick(static_cast<int>(progs.size()))]);
        int l = 1 + pick(size - 1);
        Program a = program(l), b = program(std::max(1, size - 1 - l));
        return coin() ? Program::comp(a, b) : Program::uni(a, b);
    }
    // Formula of roughly `size` symbols (literals, connectives, modalities).
    Formula formula(int size) {
        if (size <= 1) return literal();
        int r = pick(4);
        if (r < 2) {
            int l = 1 + pick(size - 1);
            Formula a = formula(l), b = formula(std::max(1, size - 1 - l));
            return r == 0 ? Formula::disj(a, b) : Formula::conj(a, b);
        }
        int ps = compoundPrograms ? 1 + pick(3) : 1;
        Program p = program(ps);
        return Formula::modal(r == 2, p, formula(std::max(1, size - ps)));
    }
    Sequent sequent(int formulas, int size) {
        Sequent s;
        for (int i = 0; i < formulas; ++i) s.push_back(formula(size));
        return s;
    }
};

// Every formula over the given variables and one atomic program whose
// symbol count (literals + binary connectives + modalities) is <= maxSize.
inline std::vector<std::vector<Formula>> enumerate_by_size(int maxSize, const std::vector<std::string>& vars,
                                                           const std::string& prog = "p") {
    std::vector<std::vector<Formula>> by(maxSize + 1);
    Program p = Program::atom(prog);
    for (const auto& v : vars) {
        by[1].push_back(Formula::lit(v, true));
        by[1].push_back(Formula::lit(v, false));
    }
    for (int n = 2; n <= maxSize; ++n) {
        for (auto f : by[n - 1]) {
            by[n].push_back(Formula::box(p, f));
            by[n].push_back(Formula::dia(p, f));
        }
        for (int l = 1; l <= n - 2; ++l)
            for (auto a : by[l])
                for (auto b : by[n - 1 - l]) {
                    by[n].push_back(Formula::disj(a, b));
                    by[n].push_back(Formula::conj(a, b));
                }
    }
    return by;
}

}  // namespace pdl::testgen
