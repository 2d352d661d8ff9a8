#pragma once
// Toy alternating machines (at most 3 states, 1-2 work cells).
#include <string>
#include <vector>

#include "pdlkit/atm.hpp"

namespace pdl::testgen {

inline AtmSpec machine_base(std::vector<std::string> states, std::string start, std::set<std::string> universal,
                            std::set<std::string> existential, int space, std::vector<std::string> input) {
    AtmSpec m;
    m.alphabet = {"0", "1", "B"};
    m.blank = "B";
    m.states = std::move(states);
    m.start = std::move(start);
    m.universal = std::move(universal);
    m.existential = std::move(existential);
    m.space = space;
    m.input = std::move(input);
    return m;
}

// Universal start state with no moves: accepts at once.
inline AtmSpec accept_now() { return machine_base({"s"}, "s", {"s"}, {}, 1, {}); }
// Existential start state with no moves: rejects at once.
inline AtmSpec reject_now() { return machine_base({"s"}, "s", {}, {"s"}, 1, {}); }

// Scans right and accepts iff the input has an even number of 1s.
inline AtmSpec parity(std::vector<std::string> input, int space) {
    AtmSpec m = machine_base({"s", "e", "o"}, "s", {"e"}, {"s", "o"}, space, std::move(input));
    m.delta[{"s", kLeftEnd}] = {{"e", kLeftEnd, 1}};
    for (const std::string& a : {"0", "B"}) {
        m.delta[{"e", a}] = {{"e", a, 1}};
        m.delta[{"o", a}] = {{"o", a, 1}};
    }
    m.delta[{"e", "1"}] = {{"o", "1", 1}};
    m.delta[{"o", "1"}] = {{"e", "1", 1}};
    return m;
}

// Universal split: one branch accepts, the other accepts only on a 1 in cell 1.
inline AtmSpec universal_split(std::vector<std::string> input) {
    AtmSpec m = machine_base({"s", "a", "b"}, "s", {"s", "a"}, {"b"}, 1, std::move(input));
    m.delta[{"s", kLeftEnd}] = {{"a", kLeftEnd, 1}, {"b", kLeftEnd, 1}};
    m.delta[{"b", "1"}] = {{"a", "1", 0}};
    return m;
}

// Existential guess between a rejecting and an accepting halt.
inline AtmSpec existential_guess() {
    AtmSpec m = machine_base({"s", "a", "b"}, "s", {"b"}, {"s", "a"}, 2, {"0"});
    m.delta[{"s", kLeftEnd}] = {{"a", kLeftEnd, 1}, {"b", kLeftEnd, 1}};
    return m;
}

// Existential self-loop on the left endmarker: never halts.
inline AtmSpec existential_loop() {
    AtmSpec m = machine_base({"s"}, "s", {}, {"s"}, 1, {});
    m.delta[{"s", kLeftEnd}] = {{"s", kLeftEnd, 0}};
    return m;
}

}  // namespace pdl::testgen
