#include "nrrd/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "nrrd/errors.hpp"

namespace nrrd {

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw DomainError("expression: " + what + " at position " +
                      std::to_string(pos));
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (eat('+')) {
        Expr rhs = parse_term();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) + rhs(x, y); };
      } else if (eat('-')) {
        Expr rhs = parse_term();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) - rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Expr parse_term() {
    Expr lhs = parse_factor();
    for (;;) {
      if (eat('*')) {
        Expr rhs = parse_factor();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) * rhs(x, y); };
      } else if (eat('/')) {
        Expr rhs = parse_factor();
        lhs = [lhs, rhs](double x, double y) { return lhs(x, y) / rhs(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Expr parse_factor() {
    Expr base = parse_unary();
    if (eat('^')) {
      Expr expo = parse_factor();  // right associative
      return [base, expo](double x, double y) {
        return std::pow(base(x, y), expo(x, y));
      };
    }
    return base;
  }

  Expr parse_unary() {
    if (eat('-')) {
      Expr inner = parse_unary();
      return [inner](double x, double y) { return -inner(x, y); };
    }
    if (eat('+')) return parse_unary();
    return parse_primary();
  }

  Expr parse_primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos += static_cast<std::size_t>(end - begin);
      return [v](double, double) { return v; };
    }

    if (c == '(') {
      ++pos;
      Expr inner = parse_expr();
      if (!eat(')')) fail("missing ')'");
      return inner;
    }

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);

      if (peek() == '(') return parse_call(name);

      if (name == "x") return [](double x, double) { return x; };
      if (name == "y") return [](double, double y) { return y; };
      if (name == "pi") return [](double, double) { return M_PI; };
      if (name == "e") return [](double, double) { return M_E; };
      pos = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected character");
  }

  Expr parse_call(const std::string& name) {
    if (!eat('(')) fail("expected '('");
    std::vector<Expr> args;
    if (peek() != ')') {
      args.push_back(parse_expr());
      while (eat(',')) args.push_back(parse_expr());
    }
    if (!eat(')')) fail("missing ')' in call of '" + name + "'");

    const auto need = [&](std::size_t n) {
      if (args.size() != n)
        fail("'" + name + "' takes " + std::to_string(n) + " argument(s)");
    };

    if (name == "sin") { need(1); Expr a = args[0];
      return [a](double x, double y) { return std::sin(a(x, y)); }; }
    if (name == "cos") { need(1); Expr a = args[0];
      return [a](double x, double y) { return std::cos(a(x, y)); }; }
    if (name == "tan") { need(1); Expr a = args[0];
      return [a](double x, double y) { return std::tan(a(x, y)); }; }
    if (name == "exp") { need(1); Expr a = args[0];
      return [a](double x, double y) { return std::exp(a(x, y)); }; }
    if (name == "log") { need(1); Expr a = args[0];
      return [a](double x, double y) { return std::log(a(x, y)); }; }
    if (name == "sqrt") { need(1); Expr a = args[0];
      return [a](double x, double y) { return std::sqrt(a(x, y)); }; }
    if (name == "abs") { need(1); Expr a = args[0];
      return [a](double x, double y) { return std::abs(a(x, y)); }; }
    if (name == "pow") { need(2); Expr a = args[0], b = args[1];
      return [a, b](double x, double y) { return std::pow(a(x, y), b(x, y)); }; }
    if (name == "min") { need(2); Expr a = args[0], b = args[1];
      return [a, b](double x, double y) { return std::min(a(x, y), b(x, y)); }; }
    if (name == "max") { need(2); Expr a = args[0], b = args[1];
      return [a, b](double x, double y) { return std::max(a(x, y), b(x, y)); }; }
    fail("unknown function '" + name + "'");
  }
};

}  // namespace

Expr parse_expression(const std::string& text) {
  Parser p(text);
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

}  // namespace nrrd
