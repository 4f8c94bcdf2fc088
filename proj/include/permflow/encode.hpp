// Compiles a validated surface program into linear concurrent constraint
// processes: one process definition per constructor/method plus the shared
// assignment definition, and a closed main process whose store evolution
// mirrors the program's permission flow.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "permflow/ast.hpp"
#include "permflow/process.hpp"
#include "permflow/term.hpp"

namespace permflow {

struct LccProgram {
  // Human-readable forms (sequential composition still explicit).
  DefTable defs;
  PProc main;

  // Executable forms (sequencing lowered to synchronization asks).
  DefTable run_defs;
  PProc run_main;

  Term z_main{};
  NameSpace ns;

  // Source-level bindings observable at the end of a run.
  std::vector<std::pair<std::string, Term>> main_vars;
  std::vector<std::pair<std::string, Term>> group_consts;

  // Statement-level depth measure of main (see depth command).
  int statement_depth = 0;
};

// The program must have passed validate() — encoding asserts well-formedness.
LccProgram encode(const ast::Program& program);

}  // namespace permflow
