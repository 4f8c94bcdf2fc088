// Small-step execution of desugared processes over a linear store:
// transition enumeration, deterministic application, and scheduled runs
// (round-robin or seeded random).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "permflow/process.hpp"

namespace permflow {

struct Configuration {
  std::vector<PProc> agents;   // flattened: no Par/Seq/empty-Tell entries
  Store store;
  std::vector<Term> hidden;    // locally created variables, in creation order
  std::uint64_t created = 0;   // processes ever added (the initial ones count)
};

// One schedulable step: fire `agent`; for choices, take `branch` using the
// `match`-th result of match_guard (indices are stable for a fixed store).
struct Transition {
  std::uint32_t agent = 0;
  std::uint32_t branch = 0;
  std::uint32_t match = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// All enabled transitions, ordered by (agent, branch, match).
std::vector<Transition> enabled_transitions(const Configuration& c,
                                            const DefTable& defs);

// Applies one transition; appends any act/run/end atoms told to `events`.
// The transition must be enabled.
void apply_transition(Configuration& c, const Transition& t,
                      const DefTable& defs, NameSpace& ns,
                      std::vector<Atom>* events);

// Seeds a configuration with the flattened parts of `main`.
Configuration initial_configuration(const PProc& main);

enum class RunStatus { QuiescentOk, QuiescentStuck, StepLimit };

struct SchedulePolicy {
  enum Kind { RoundRobin, Random } kind = RoundRobin;
  std::uint64_t seed = 0;
};

struct RunResult {
  RunStatus status = RunStatus::QuiescentOk;
  Configuration config;
  std::vector<Atom> events;           // act/run/end tells, in order
  std::vector<Transition> decisions;  // the schedule actually taken
  std::uint64_t steps = 0;
};

RunResult run_scheduled(const PProc& main, const DefTable& defs, NameSpace& ns,
                        SchedulePolicy policy, std::uint64_t max_steps = 100000);

// Replays a recorded decision sequence; stops early if a decision is not
// enabled (the returned result then has fewer steps than decisions).
RunResult run_replay(const PProc& main, const DefTable& defs, NameSpace& ns,
                     const std::vector<Transition>& decisions);

// True when the store carries the top-level success token ok().
bool reached_ok(const Store& s);

}  // namespace permflow
