#pragma once
#include <stdexcept>
#include <string>

namespace pdl {

// Exit-code classes used by the CLI: shape/usage -> 2, bounds -> 3.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : ShapeError {
    std::size_t pos;
    ParseError(const std::string& msg, std::size_t at)
        : ShapeError(msg + " at position " + std::to_string(at)), pos(at) {}
};

struct BoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pdl
