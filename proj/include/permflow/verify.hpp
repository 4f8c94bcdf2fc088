// Reachability verification over encoded programs: breadth-first exploration
// of the transition system with canonical-state pruning, bounded by the
// program's depth measure, answering queries such as deadlock freedom,
// statement concurrency and method completion.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permflow/ast.hpp"
#include "permflow/machine.hpp"
#include "permflow/store.hpp"

namespace permflow {

enum class Answer : std::uint8_t { Provable, NotProvable, Inconclusive };

struct Query {
  enum Kind : std::uint8_t {
    Reachable,        // goal text in `goal`
    DeadlockFree,     // ok-reachability plus per-line completion flags
    Concurrent,       // line_a, line_b
    MethodCompletes,  // class_name, member_name
  } kind = DeadlockFree;

  std::string goal;
  int line_a = 0;
  int line_b = 0;
  std::string class_name;
  std::string member_name;
};

// Completion reachability of one statement line (DeadlockFree queries).
struct LineEnd {
  int line = 0;
  bool end_reachable = false;
};

struct Verdict {
  Answer answer = Answer::NotProvable;
  // Transition sequence replayable from the encoded main to a goal-matching
  // store; present exactly when the answer is Provable.
  std::optional<std::vector<Transition>> witness;
  std::uint64_t states_explored = 0;

  // The exploration keeps the larger of the two depth measures, plus one;
  // both ingredients are recorded.
  int depth_bound = 0;
  int comp_main = 0;
  int statement_depth = 0;

  // Largest positive-phase count observed on any explored branch — bounded
  // by depth_bound whenever the depth accounting is sound.
  int max_phases_seen = 0;

  std::vector<LineEnd> line_ends;  // DeadlockFree only, sorted by line
};

struct VerifyOptions {
  std::uint64_t state_budget = 1'000'000;
};

// Goal mini-syntax: comma-separated atoms, e.g.
//   "run(_,_,13,_), run(_,_,14,_)"
// `_` arguments are wildcards (existentially closed), digit sequences are
// numbers, anything else is a constant. Wildcard variables are minted from
// `ns`. Throws std::invalid_argument on malformed input.
Guard parse_goal(const std::string& text, NameSpace& ns);

// ---------------------------------------------------------------------------
// Core engine, exposed for tests that build process-level programs directly.

struct GoalOutcome {
  bool reached = false;
  std::optional<std::vector<Transition>> witness;
};

struct Exploration {
  std::vector<GoalOutcome> goals;  // one per input goal
  std::uint64_t states_explored = 0;
  int max_phases_seen = 0;
  std::uint64_t bound_prunes = 0;  // branches cut by the phase bound
  bool budget_hit = false;
  bool exhausted = false;  // the full canonical space fit within the budget
};

// Explores every canonical state reachable from `main`, testing each goal
// against each state's store (a match against any sub-store counts). Stops
// early once all goals are reached. `ns0` is cloned internally, so witnesses
// replay against a fresh copy of the same namespace.
Exploration explore_reachable(const PProc& main, const DefTable& defs,
                              const NameSpace& ns0,
                              const std::vector<Guard>& goals, int phase_bound,
                              std::uint64_t state_budget);

// ---------------------------------------------------------------------------
// Queries over source programs (parsed and validated).

Verdict verify(const ast::Program& p, const Query& q,
               const VerifyOptions& opt = {});

Verdict prove_reachable(const ast::Program& p, const std::string& goal,
                        const VerifyOptions& opt = {});
Verdict check_deadlock(const ast::Program& p, const VerifyOptions& opt = {});
Verdict check_concurrent(const ast::Program& p, int line_a, int line_b,
                         const VerifyOptions& opt = {});
Verdict check_method(const ast::Program& p, const std::string& class_name,
                     const std::string& member_name,
                     const VerifyOptions& opt = {});

}  // namespace permflow
