// Terms, interned symbols, variable namespaces, atoms and substitutions:
// the first-order vocabulary everything else (stores, processes, formulas)
// is built from.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace permflow {

// Interned name for constants and predicate symbols (process-wide).
using Symbol = std::uint32_t;

Symbol intern(std::string_view name);
const std::string& symbol_name(Symbol s);

enum class TermKind : std::uint8_t {
  Const,  // interned constant (nil, ndg, nst, unq, group names, labels, ...)
  Var,    // variable; id indexes a NameSpace (or a scratch id during matching)
  Nat,    // machine natural
  Succ,   // s(v) over the variable with this id; stores never hold Succ terms
};

struct Term {
  TermKind kind{TermKind::Const};
  std::uint32_t id{0};

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

inline Term make_const(Symbol s) { return Term{TermKind::Const, s}; }
Term make_const(std::string_view name);
inline Term make_nat(std::uint32_t n) { return Term{TermKind::Nat, n}; }
inline Term make_var(std::uint32_t id) { return Term{TermKind::Var, id}; }
// s(v); only variables may sit under a successor in guard/tell patterns.
inline Term make_succ(Term var) { return Term{TermKind::Succ, var.id}; }

// Scratch variables live above this bound; they are internal to guard
// matching and never appear in stores, processes or rendered output.
inline constexpr std::uint32_t kScratchVarBase = 0x8000'0000u;
inline bool is_scratch_var(Term t) {
  return t.kind == TermKind::Var && t.id >= kScratchVarBase;
}

// Per-run variable table. Every fresh() call mints a new variable whose
// rendered name is "<BASE>_<id>"; the id is the table's running counter, so
// names are unique within a run and deterministic across runs.
class NameSpace {
 public:
  Term fresh(std::string_view base, int line = -1);
  Term fresh_like(Term v, const NameSpace& source);

  const std::string& base(Term v) const;
  int line(Term v) const;          // -1 when the variable has no line tag
  std::string name(Term v) const;  // "BASE_id"
  std::size_t size() const { return vars_.size(); }

  // Grows or shrinks the table to exactly n entries; new entries are inert
  // placeholders. Used by replay-aligned exploration to position the fresh
  // counter without re-minting another branch's variables one by one.
  void pad_resize(std::size_t n);

 private:
  struct VarInfo {
    Symbol base;
    int line;
  };
  std::vector<VarInfo> vars_;
};

// A (possibly banged) predicate applied to terms.
struct Atom {
  Symbol pred{0};
  std::vector<Term> args;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

Atom make_atom(std::string_view pred, std::vector<Term> args);

// Variable -> term binding map (small, flat).
class Subst {
 public:
  void bind(Term var, Term value);
  std::optional<Term> lookup(Term var) const;
  bool contains(Term var) const { return lookup(var).has_value(); }
  std::size_t size() const { return map_.size(); }
  const std::vector<std::pair<Term, Term>>& entries() const { return map_; }

  // Applies bindings; Succ(v) with v bound to Nat k evaluates to Nat k+1.
  Term apply(Term t) const;
  Atom apply(const Atom& a) const;

 private:
  std::vector<std::pair<Term, Term>> map_;
};

// Rendering. Variables render as "BASE_id"; sync/act/run/end display their
// line-tagged sync argument as "line_N (NAME)"; the ndg constant renders
// as "ng".
std::string render_term(Term t, const NameSpace& ns);
std::string render_atom(const Atom& a, const NameSpace& ns, bool banged = false);

// Well-known symbols, interned once.
struct Vocab {
  Symbol ref, field, gpar, sync, act, run, end, ct, dg, env, ok;
  Symbol unq, shr, imm, none, atm, conc;
  Symbol nil, ndg, nst, block, assg, dflt;
  static const Vocab& get();
};

struct TermHash {
  std::size_t operator()(const Term& t) const {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(t.kind) << 32) | t.id);
  }
};

}  // namespace permflow
