#include "pdlkit/json_ast.hpp"

namespace pdl {

using nlohmann::json;

json to_json_ast(Program p) {
    switch (p.kind()) {
        case ProgKind::Atom: return {{"atom", p.name()}};
        case ProgKind::Comp: return {{"comp", json::array({to_json_ast(p.left()), to_json_ast(p.right())})}};
        case ProgKind::Union: return {{"union", json::array({to_json_ast(p.left()), to_json_ast(p.right())})}};
        case ProgKind::Star: return {{"star", to_json_ast(p.body())}};
    }
    throw std::logic_error("to_json_ast: bad program");
}

json to_json_ast(Formula f) {
    switch (f.kind()) {
        case FKind::Lit: return {{"lit", f.var()}, {"pos", f.positive()}};
        case FKind::Or: return {{"or", json::array({to_json_ast(f.left()), to_json_ast(f.right())})}};
        case FKind::And: return {{"and", json::array({to_json_ast(f.left()), to_json_ast(f.right())})}};
        case FKind::Box: return {{"box", to_json_ast(f.prog())}, {"body", to_json_ast(f.body())}};
        case FKind::Dia: return {{"dia", to_json_ast(f.prog())}, {"body", to_json_ast(f.body())}};
    }
    throw std::logic_error("to_json_ast: bad formula");
}

json to_json_ast(const Sequent& s) {
    json out = json::array();
    for (auto f : s) out.push_back(to_json_ast(f));
    return out;
}

namespace {
std::pair<json, json> pairOf(const json& j, const char* key) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 2) throw ShapeError(std::string("json ast: '") + key + "' needs two operands");
    return {a[0], a[1]};
}
}  // namespace

Program program_from_json_ast(const json& j) {
    if (!j.is_object() || j.size() != 1) throw ShapeError("json ast: program must be a one-key object");
    if (j.contains("atom")) return Program::atom(j["atom"].get<std::string>());
    if (j.contains("comp")) {
        auto [l, r] = pairOf(j, "comp");
        return Program::comp(program_from_json_ast(l), program_from_json_ast(r));
    }
    if (j.contains("union")) {
        auto [l, r] = pairOf(j, "union");
        return Program::uni(program_from_json_ast(l), program_from_json_ast(r));
    }
    if (j.contains("star")) return Program::star(program_from_json_ast(j["star"]));
    throw ShapeError("json ast: unknown program kind " + j.dump());
}

Formula formula_from_json_ast(const json& j) {
    if (!j.is_object()) throw ShapeError("json ast: formula must be an object");
    if (j.contains("lit")) return Formula::lit(j["lit"].get<std::string>(), j.value("pos", true));
    if (j.contains("or")) {
        auto [l, r] = pairOf(j, "or");
        return Formula::disj(formula_from_json_ast(l), formula_from_json_ast(r));
    }
    if (j.contains("and")) {
        auto [l, r] = pairOf(j, "and");
        return Formula::conj(formula_from_json_ast(l), formula_from_json_ast(r));
    }
    if (j.contains("box")) return Formula::box(program_from_json_ast(j["box"]), formula_from_json_ast(j.at("body")));
    if (j.contains("dia")) return Formula::dia(program_from_json_ast(j["dia"]), formula_from_json_ast(j.at("body")));
    throw ShapeError("json ast: unknown formula kind " + j.dump());
}

}  // namespace pdl
