#include "whorl/expression.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <system_error>

namespace whorl {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Exponents above this are almost certainly typos and expand to huge maps.
constexpr unsigned long kMaxExponent = 1024;

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>& params)
      : text_(text), tokens_(tokenize(text)), params_(params) {}

  ParamPolynomial2 parse() {
    ParamPolynomial2 result = expr();
    if (!at_end()) fail("operator or end of input");
    return result;
  }

 private:
  ParamPolynomial2 expr() {
    ParamPolynomial2 acc = term();
    while (!at_end() && (peek().kind == Token::Kind::plus || peek().kind == Token::Kind::minus)) {
      const bool minus = next().kind == Token::Kind::minus;
      ParamPolynomial2 rhs = term();
      if (minus) {
        acc -= rhs;
      } else {
        acc += rhs;
      }
    }
    return acc;
  }

  ParamPolynomial2 term() {
    ParamPolynomial2 acc = factor();
    while (!at_end() && peek().kind == Token::Kind::star) {
      next();
      acc *= factor();
    }
    return acc;
  }

  ParamPolynomial2 factor() {
    ParamPolynomial2 b = base();
    if (!at_end() && peek().kind == Token::Kind::caret) {
      next();
      if (at_end() || peek().kind != Token::Kind::number) fail("nonnegative integer exponent");
      const Token& tok = peek();
      unsigned long n = 0;
      auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), n);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
        fail("nonnegative integer exponent");
      }
      if (n > kMaxExponent) fail("exponent at most " + std::to_string(kMaxExponent));
      next();
      b = b.pow(static_cast<unsigned>(n));
    }
    return b;
  }

  ParamPolynomial2 base() {
    if (at_end()) fail("number, variable, parameter, '(' or '-'");
    const Token& tok = peek();
    switch (tok.kind) {
      case Token::Kind::number: {
        next();
        return ParamPolynomial2::constant(number_value(tok));
      }
      case Token::Kind::identifier: {
        next();
        if (tok.text == "x") return ParamPolynomial2::variable(Variable::x);
        if (tok.text == "y") return ParamPolynomial2::variable(Variable::y);
        if (params_.count(tok.text)) {
          return ParamPolynomial2::constant(ParamCoefficient::parameter(tok.text));
        }
        fail_at(tok.offset, "x, y or a declared parameter");
      }
      case Token::Kind::lparen: {
        next();
        ParamPolynomial2 inner = expr();
        if (at_end() || peek().kind != Token::Kind::rparen) fail("')'");
        next();
        return inner;
      }
      case Token::Kind::minus: {
        next();
        return -factor();
      }
      default:
        fail("factor");
    }
  }

  double number_value(const Token& tok) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || !std::isfinite(v)) {
      fail_at(tok.offset, "finite number");
    }
    return v;
  }

  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string& expected) const {
    fail_at(at_end() ? text_.size() : peek().offset, expected);
  }
  [[noreturn]] void fail_at(std::size_t offset, const std::string& expected) const {
    throw ParseError(offset, expected);
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  const std::set<std::string>& params_;
  std::size_t pos_ = 0;
};

void append_monomial(std::string& out, Exponent e, bool after_factor) {
  auto power = [&](const char* var, int n) {
    if (n == 0) return;
    if (after_factor) out += '*';
    after_factor = true;
    out += var;
    if (n > 1) out += "^" + std::to_string(n);
  };
  power("x", e.x);
  power("y", e.y);
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto single = [&](Token::Kind kind) {
      tokens.push_back({kind, std::string(text.substr(start, 1)), start});
      ++i;
    };
    switch (c) {
      case '+': single(Token::Kind::plus); continue;
      case '-': single(Token::Kind::minus); continue;
      case '*': single(Token::Kind::star); continue;
      case '^': single(Token::Kind::caret); continue;
      case '(': single(Token::Kind::lparen); continue;
      case ')': single(Token::Kind::rparen); continue;
      default: break;
    }
    if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      while (i < text.size() && is_digit(text[i])) ++i;
      if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && is_digit(text[i])) ++i;
      }
      tokens.push_back({Token::Kind::number, std::string(text.substr(start, i - start)), start});
      continue;
    }
    if (is_ident_start(c)) {
      while (i < text.size() && is_ident_char(text[i])) ++i;
      tokens.push_back({Token::Kind::identifier, std::string(text.substr(start, i - start)), start});
      continue;
    }
    throw LexError(start);
  }
  return tokens;
}

ParamPolynomial2 parse_poly(std::string_view text, const std::set<std::string>& params) {
  for (const auto& name : params) {
    if (name == "x" || name == "y") throw InvalidField("'" + name + "' cannot be a parameter name");
  }
  return Parser(text, params).parse();
}

ParamBindings make_bindings(const std::vector<ParamBinding>& bindings) {
  ParamBindings out;
  for (const auto& b : bindings) {
    if (!out.emplace(b.name, b.value).second) throw DuplicateParam(b.name);
  }
  return out;
}

ParamBinding parse_binding(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw InvalidField("parameter binding must look like NAME=VALUE, got '" + std::string(text) + "'");
  }
  const std::string name(text.substr(0, eq));
  if (!is_ident_start(name.front()) ||
      !std::all_of(name.begin(), name.end(), [](char c) { return is_ident_char(c); })) {
    throw InvalidField("invalid parameter name '" + name + "'");
  }
  const std::string value_text(text.substr(eq + 1));
  char* end = nullptr;
  const double value = std::strtod(value_text.c_str(), &end);
  if (value_text.empty() || end != value_text.c_str() + value_text.size() || !std::isfinite(value)) {
    throw InvalidField("invalid value for parameter '" + name + "'");
  }
  return {name, value};
}

Polynomial2d parse_bound(std::string_view text, const ParamBindings& bindings) {
  std::set<std::string> names;
  for (const auto& [name, value] : bindings) names.insert(name);
  return whorl::bind(parse_poly(text, names), bindings);
}

std::string format_decimal(double value) {
  char buf[1100];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

std::string to_string(const Polynomial2d& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const bool negative = std::signbit(c);
    const double magnitude = std::fabs(c);
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    const bool with_coefficient = e.total() == 0 || magnitude != 1.0;
    if (with_coefficient) out += format_decimal(magnitude);
    append_monomial(out, e, with_coefficient);
  }
  return out;
}

}  // namespace whorl
