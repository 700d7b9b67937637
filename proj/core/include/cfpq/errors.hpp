#pragma once

#include <stdexcept>
#include <string>

namespace cfpq {

// Malformed input text. line is 1-based, 0 when the error is not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A nonterminal, terminal, or node name that is not declared in the instance.
class UnknownSymbolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cfpq
