// Process terms of the linear concurrent constraint language the encoder
// targets: tells, guarded choices, parallel composition, local (hidden)
// variables, definition calls, and a sequencing operator that is compiled
// away before execution.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "permflow/store.hpp"
#include "permflow/term.hpp"

namespace permflow {

struct Process;
using PProc = std::shared_ptr<const Process>;

enum class ProcKind : std::uint8_t { Tell, Choice, Par, Local, Call, Seq };

struct ProcBranch {
  std::vector<Term> bound;
  std::vector<Atom> guard;
  PProc body;
};

struct Process {
  ProcKind kind{ProcKind::Tell};

  // Tell
  std::vector<Atom> tells;
  std::vector<Atom> banged_tells;
  // Choice
  std::vector<ProcBranch> branches;
  // Par
  std::vector<PProc> kids;
  // Local / Seq
  std::vector<Term> decls;  // Local only
  PProc left;               // Local body / Seq first
  PProc right;              // Seq second
  // Call
  Symbol callee{0};
  std::vector<Term> args;
};

// Builders.
PProc p_tell(std::vector<Atom> atoms, std::vector<Atom> banged = {});
PProc p_ask(std::vector<Term> bound, std::vector<Atom> guard, PProc body);
PProc p_choice(std::vector<ProcBranch> branches);
PProc p_par(std::vector<PProc> kids);
PProc p_local(std::vector<Term> decls, PProc body);
PProc p_call(Symbol callee, std::vector<Term> args);
PProc p_seq(PProc first, PProc second);
inline PProc p_skip() { return p_tell({}); }

struct Def {
  Symbol name;
  std::vector<Term> params;
  PProc body;
};

class DefTable {
 public:
  void add(Def d);
  const Def* find(Symbol name) const;
  const std::vector<Def>& all() const { return defs_; }

 private:
  std::vector<Def> defs_;
};

// Capture-free substitution of variables (bound occurrences shadow).
PProc subst_process(const PProc& p, const Subst& s);

// Removes every Seq by threading synchronization variables: the left-hand
// side is translated so that it tells sync(w) exactly on completion, and the
// right-hand side is guarded by sync(w). Calls never appear on the left of a
// sequence in encoder output.
PProc desugar(const PProc& p, NameSpace& ns);
void desugar_defs(DefTable& defs, NameSpace& ns);

// Translates `p` so that it tells sync(z) exactly when every piece of it has
// finished; the building block of desugar, exposed for callers that fuse the
// completion join with their own continuation guard.
PProc completing(const PProc& p, Term z, NameSpace& ns);

// Multi-line textual form (ltell / ask ... then / par / local / call).
std::string render_process(const PProc& p, const NameSpace& ns, int indent = 0);

// One-line form of a blocked choice for stuck reports:
//   "ask g1 & g2 then ... + ask g3 then ..."
std::string render_blocked(const PProc& p, const NameSpace& ns);

}  // namespace permflow
