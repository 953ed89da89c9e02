// expression.hpp - arithmetic over numbers and named constants, used for
// configuration values such as "pi/30", "2*pi*0.1" or "Omega/8".
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary | primary)*      // "2pi" == "2*pi"
//   unary   := ('+' | '-') unary | primary
//   primary := number | symbol | '(' expr ')'

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "chiral/errors.hpp"

namespace chiral {

class ExpressionError : public Error {
public:
    ExpressionError(const std::string& what, std::size_t at)
        : Error(what), offset(at) {}
    std::size_t offset;  // 0-based position in the expression text
};

using SymbolTable = std::map<std::string, double, std::less<>>;

double evaluate_expression(std::string_view text, const SymbolTable& symbols);

}  // namespace chiral
