// Linear constraint store: a multiset of linear atoms plus a set of banged
// (replicated) atoms, guard matching modulo the permission up/downgrade
// axioms, and canonical keys modulo renaming of hidden variables.
#pragma once

#include <string>
#include <vector>

#include "permflow/term.hpp"

namespace permflow {

struct Store {
  std::vector<Atom> linear;  // multiset, kept sorted
  std::vector<Atom> banged;  // set, kept sorted and deduplicated

  void add_linear(Atom a);
  void add_banged(Atom a);
  bool has_banged(const Atom& a) const;
  // Restores sortedness after bulk edits.
  void normalize();

  friend bool operator==(const Store&, const Store&) = default;
};

// One alternative of a guard: universally quantified variables plus the atoms
// that must be consumed (or copied, for banged facts) from the store.
struct Guard {
  std::vector<Term> bound;
  std::vector<Atom> atoms;

  friend bool operator==(const Guard&, const Guard&) = default;
};

// A permission conversion axiom: lhs atoms are consumed, rhs atoms produced.
struct Axiom {
  std::string name;
  std::vector<Term> vars;  // scratch variables local to the axiom
  std::vector<Atom> lhs;
  std::vector<Atom> rhs;
};

// The four reference-permission conversion axioms (downgrade unique to
// shared/immutable, upgrade shared/immutable back to unique when ct = 1).
const std::vector<Axiom>& permission_axioms();

struct Match {
  Subst subst;              // bindings for the guard's bound variables
  Store residual;           // store after consuming the matched atoms
  std::vector<std::string> axioms_used;
};

// All distinct ways the guard can fire against the store, each applying at
// most two axiom rewrites per ref atom in the guard. Banged atoms satisfy
// guard atoms by copy and are never consumed. Results are deterministic:
// sorted by (bindings, residual, axiom trace) and deduplicated on
// (bindings, residual).
std::vector<Match> match_guard(const Store& s, const Guard& g);

// Canonical key: two stores yield equal keys iff they are identical up to a
// bijective renaming of the given hidden variables.
std::string canonicalize(const Store& s, const std::vector<Term>& hidden,
                         const NameSpace& ns);

// Plain listing of the store (linear atoms then banged), for debugging and
// trace output.
std::string render_store(const Store& s, const NameSpace& ns);

}  // namespace permflow
