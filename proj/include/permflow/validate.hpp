// Static well-formedness checks over the surface AST: name resolution,
// class/field/method references, contract completeness, group visibility,
// and resolvability of shared-permission group parameters.
#pragma once

#include <string>
#include <vector>

#include "permflow/ast.hpp"

namespace permflow {

struct Diagnostic {
  std::string file;
  int line = 0;
  int col = 1;
  std::string message;
};

std::string to_string(const Diagnostic& d);

// Returns all problems found; an empty vector means the program is valid.
std::vector<Diagnostic> validate(const ast::Program& program);

}  // namespace permflow
