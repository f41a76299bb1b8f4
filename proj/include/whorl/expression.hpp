#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "whorl/polynomial.hpp"

namespace whorl {

struct Token {
  enum class Kind { number, identifier, plus, minus, star, caret, lparen, rparen };

  Kind kind;
  std::string text;
  std::size_t offset;
};

// Splits text into tokens, skipping ASCII whitespace. Throws LexError at the
// first byte outside the token alphabet.
std::vector<Token> tokenize(std::string_view text);

// Parses a polynomial expression in x, y and the given parameter names and
// expands it into canonical form with parameters kept symbolic.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor ('*' factor)*
//   factor := base ('^' uint)?
//   base   := number | 'x' | 'y' | param | '(' expr ')' | '-' factor
//
// "-x^2" reads as -(x^2). Throws LexError or ParseError.
ParamPolynomial2 parse_poly(std::string_view text, const std::set<std::string>& params = {});

struct ParamBinding {
  std::string name;
  double value;
};

using ParamBindings = std::map<std::string, double>;

// Throws DuplicateParam if a name repeats.
ParamBindings make_bindings(const std::vector<ParamBinding>& bindings);

// Parses "NAME=VALUE".
ParamBinding parse_binding(std::string_view text);

// Convenience: parse with the binding names as parameters, then bind.
Polynomial2d parse_bound(std::string_view text, const ParamBindings& bindings);

}  // namespace whorl
