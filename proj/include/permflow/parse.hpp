// Lexer and recursive-descent parser for the annotated surface language.
// Errors are reported as "file:line:col: message".
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "permflow/ast.hpp"

namespace permflow {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws ParseError on malformed input.
ast::Program parse_program(std::string_view source, std::string file = "<input>");

// Convenience: read the file and parse it.
ast::Program parse_file(const std::string& path);

}  // namespace permflow
