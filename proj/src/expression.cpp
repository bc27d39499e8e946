#include "kgm/expression.hpp"

#include "kgm/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

namespace kgm {

namespace {

using Fn = std::function<double(double)>;

class Parser {
public:
  explicit Parser(const std::string &text) : s_(text) {}

  Fn parse() {
    Fn f = expr();
    skip();
    if (pos_ != s_.size())
      fail("unexpected character");
    return f;
  }

private:
  [[noreturn]] void fail(const std::string &what) const {
    throw ConfigError("potential.expr: " + what + " at position " + std::to_string(pos_) +
                      " in \"" + s_ + "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn expr() {
    Fn lhs = term();
    while (true) {
      if (accept('+'))
        lhs = [a = lhs, b = term()](double r) { return a(r) + b(r); };
      else if (accept('-'))
        lhs = [a = lhs, b = term()](double r) { return a(r) - b(r); };
      else
        return lhs;
    }
  }

  Fn term() {
    Fn lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = [a = lhs, b = unary()](double r) { return a(r) * b(r); };
      else if (accept('/'))
        lhs = [a = lhs, b = unary()](double r) { return a(r) / b(r); };
      else
        return lhs;
    }
  }

  Fn unary() {
    if (accept('-'))
      return [a = unary()](double r) { return -a(r); };
    if (accept('+'))
      return unary();
    return power();
  }

  Fn power() {
    Fn base = primary();
    if (accept('^'))
      return [a = base, b = unary()](double r) { return std::pow(a(r), b(r)); };
    return base;
  }

  Fn primary() {
    skip();
    if (pos_ >= s_.size())
      fail("unexpected end of input");
    if (accept('(')) {
      Fn inner = expr();
      if (!accept(')'))
        fail("expected ')'");
      return inner;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
      if (ec != std::errc())
        fail("malformed number");
      pos_ = static_cast<std::size_t>(end - s_.data());
      return [value](double) { return value; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "r")
        return [](double r) { return r; };
      if (name == "pi")
        return [](double) { return std::numbers::pi; };
      static const std::map<std::string, double (*)(double)> functions{
          {"exp", [](double x) { return std::exp(x); }},
          {"log", [](double x) { return std::log(x); }},
          {"sqrt", [](double x) { return std::sqrt(x); }},
          {"abs", [](double x) { return std::abs(x); }},
          {"sin", [](double x) { return std::sin(x); }},
          {"cos", [](double x) { return std::cos(x); }},
          {"tanh", [](double x) { return std::tanh(x); }},
          {"cosh", [](double x) { return std::cosh(x); }},
      };
      const auto it = functions.find(name);
      if (it == functions.end()) {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!accept('('))
        fail("expected '(' after " + name);
      Fn arg = expr();
      if (!accept(')'))
        fail("expected ')'");
      return [f = it->second, arg](double r) { return f(arg(r)); };
    }
    fail("unexpected character");
  }

  const std::string &s_;
  std::size_t pos_ = 0;
};

} // namespace

std::function<double(double)> compile_expression(const std::string &text) {
  return Parser(text).parse();
}

} // namespace kgm
