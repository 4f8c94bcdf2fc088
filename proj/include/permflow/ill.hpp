#pragma once

#include <memory>
#include <string>
#include <vector>

#include "permflow/process.hpp"

namespace permflow {

// ---------------------------------------------------------------------------
// Intuitionistic-linear-logic formulas. Processes read as formulas: parallel
// composition is a tensor, a guarded choice is a With of universally closed
// linear implications, locals are existentials, and replicated facts are
// banged atoms.

enum class FormulaKind : std::uint8_t {
  AtomF,
  Tensor,
  With,
  Lolli,
  Exists,
  Forall,
  Bang,
  One,
  Top,
};

struct Formula;
using PFormula = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind{};
  Atom atom;                   // AtomF
  std::vector<PFormula> kids;  // Tensor, With; Lolli = kids[0] -o kids[1]
  std::vector<Term> vars;      // Exists, Forall
  PFormula body;               // Exists, Forall, Bang
};

bool formula_equal(const PFormula& a, const PFormula& b);

PFormula f_atom(Atom a);
PFormula f_one();
PFormula f_top();
// Tensor simplification: units are dropped (A otimes 1 is identified with A),
// an empty tensor is 1, and a one-element tensor is the element itself.
PFormula f_tensor(std::vector<PFormula> kids);
// A one-branch With collapses to its branch.
PFormula f_with(std::vector<PFormula> kids);
PFormula f_lolli(PFormula lhs, PFormula rhs);
PFormula f_exists(std::vector<Term> vars, PFormula body);
PFormula f_forall(std::vector<Term> vars, PFormula body);
PFormula f_bang(PFormula body);

// Structural translation of a desugared process (no sequential composition
// remains). Throws std::logic_error on a Seq node.
PFormula to_ill(const PProc& p);

// The logical theory of a program: one banged, universally closed clause per
// definition plus the four permission-conversion axioms.
struct Theory {
  std::vector<PFormula> clauses;
};
Theory make_theory(const DefTable& defs);

// ---------------------------------------------------------------------------
// Depth calculus. comp bounds the number of positive phases (choice firings
// and call unfoldings) any run of the process can take; comp_sc is the
// variant for the left-hand side of a sequential composition, where a
// parallel group additionally pays for its own completion join.
//
// Rules: tells are free; a choice costs 1 plus its deepest branch, except
// that a guard made only of dg atoms is charged one per atom; parallel
// composition is additive; locals are transparent; a call unfolds into
// 1 + comp(definition body); P;Q costs 1 + comp_sc(P) + comp(Q).
// Cyclic definitions are reported by throwing std::runtime_error.
int comp(const PProc& p, const DefTable& defs);

// ---------------------------------------------------------------------------
// Text form. Parenthesized ASCII: `*` tensor, `&` with, `-o` implication,
// `!` bang, `exists x y. F`, `forall x y. F`, `1`, `top`. Atoms print as
// pred(arg,...) with variables shown as NAME_id and numerals as digits;
// read_ill restores variables from the _id suffix, so rendering and
// re-reading yields an equal formula.
std::string render_ill(const PFormula& f, const NameSpace& ns);
PFormula read_ill(const std::string& text);

// Fragment membership. Guards: G := atom | G*G | exists x.G. Processes:
// P := 1 | atom | !atom | P*P | exists x.P | &_i forall x~.(G -o P) | defname(x~).
bool in_goal_fragment(const PFormula& f);
bool in_process_fragment(const PFormula& f);

}  // namespace permflow
