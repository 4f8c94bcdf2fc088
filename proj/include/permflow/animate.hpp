// Runs an encoded program under a schedule and reports the permission flow:
// the act/run/end event stream, suspended asks on deadlock, and the final
// per-variable permissions.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permflow/encode.hpp"
#include "permflow/machine.hpp"

namespace permflow {

// Final state of one source-level variable, read off the final store.
struct Binding {
  std::string name;
  bool bound = false;  // false: no ref atom survived for this variable
  Term var{};          // the run-time variable
  Term obj{};          // object or nil
  Term perm{};
  Term group{};
  std::optional<std::uint32_t> count;  // ct of obj when obj is not nil
};

struct TraceReport {
  RunStatus status{RunStatus::QuiescentOk};
  std::vector<Atom> events;             // act/run/end atoms in firing order
  std::vector<std::string> killed;      // rendered suspended asks
  std::vector<Binding> bindings;        // main-scope variables
  std::vector<std::string> variables;   // "VAR -> OBJ. perm:group" lines
  std::uint64_t process_count = 0;
  std::uint64_t steps = 0;
  std::vector<Transition> decisions;    // schedule replay data
  Store final_store;
};

// Runs prog.run_main (mutating prog.ns as fresh variables are minted).
TraceReport animate(LccProgram& prog, SchedulePolicy policy,
                    std::uint64_t max_steps = 100000);

// Builds a report from an existing run result (e.g. a replayed witness).
TraceReport report_from_run(const RunResult& run, const LccProgram& prog);

// One line per suspended choice agent, guards rendered with current names.
std::vector<std::string> report_stuck(const Configuration& c,
                                      const NameSpace& ns);

std::string render_trace_text(const TraceReport& r, const NameSpace& ns);
std::string render_trace_json(const TraceReport& r, const NameSpace& ns);

}  // namespace permflow
