#pragma once

#include <functional>
#include <string>

namespace kgm {

/// Compiles an arithmetic expression in the radius r, e.g. "r^2 + exp(-r)".
///
/// Grammar: numbers, r, pi, + - * / ^ (right-associative), parentheses and
/// the functions exp, log, sqrt, abs, sin, cos, tanh, cosh. Throws
/// ConfigError with the offending position on malformed input.
std::function<double(double)> compile_expression(const std::string &text);

} // namespace kgm
