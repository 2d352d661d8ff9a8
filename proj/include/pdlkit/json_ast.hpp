#pragma once
// Canonical JSON AST for programs and formulas, one object kind per variant.
//   program: {"atom": "p"} | {"comp": [P, Q]} | {"union": [P, Q]} | {"star": P}
//   formula: {"lit": "x", "pos": true} | {"or": [F, G]} | {"and": [F, G]}
//            | {"box": P, "body": F} | {"dia": P, "body": F}
#include <json.hpp>

#include "formula.hpp"

namespace pdl {

nlohmann::json to_json_ast(Program p);
nlohmann::json to_json_ast(Formula f);
nlohmann::json to_json_ast(const Sequent& s);
Program program_from_json_ast(const nlohmann::json& j);
Formula formula_from_json_ast(const nlohmann::json& j);

}  // namespace pdl
