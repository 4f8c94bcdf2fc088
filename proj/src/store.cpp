#include "permflow/store.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace permflow {

void Store::add_linear(Atom a) {
  auto it = std::lower_bound(linear.begin(), linear.end(), a);
  linear.insert(it, std::move(a));
}

void Store::add_banged(Atom a) {
  auto it = std::lower_bound(banged.begin(), banged.end(), a);
  if (it != banged.end() && *it == a) return;
  banged.insert(it, std::move(a));
}

bool Store::has_banged(const Atom& a) const {
  return std::binary_search(banged.begin(), banged.end(), a);
}

void Store::normalize() {
  std::sort(linear.begin(), linear.end());
  std::sort(banged.begin(), banged.end());
  banged.erase(std::unique(banged.begin(), banged.end()), banged.end());
}

const std::vector<Axiom>& permission_axioms() {
  static const std::vector<Axiom> axioms = [] {
    const Vocab& vb = Vocab::get();
    auto C = [](Symbol s) { return make_const(s); };
    // Axiom-local variables; instantiated with scratch ids per application.
    Term x = make_var(0), o = make_var(1), g = make_var(2);
    std::vector<Axiom> out;
    out.push_back(Axiom{
        "downgrade_shr",
        {x, o, g},
        {Atom{vb.ref, {x, o, C(vb.unq), C(vb.ndg)}}},
        {Atom{vb.ref, {x, o, C(vb.shr), g}}}});
    out.push_back(Axiom{
        "downgrade_imm",
        {x, o},
        {Atom{vb.ref, {x, o, C(vb.unq), C(vb.ndg)}}},
        {Atom{vb.ref, {x, o, C(vb.imm), C(vb.ndg)}}}});
    out.push_back(Axiom{
        "upgrade_shr",
        {x, o, g},
        {Atom{vb.ref, {x, o, C(vb.shr), g}}, Atom{vb.ct, {o, make_nat(1)}}},
        {Atom{vb.ref, {x, o, C(vb.unq), C(vb.ndg)}}, Atom{vb.ct, {o, make_nat(1)}}}});
    out.push_back(Axiom{
        "upgrade_imm",
        {x, o},
        {Atom{vb.ref, {x, o, C(vb.imm), C(vb.ndg)}}, Atom{vb.ct, {o, make_nat(1)}}},
        {Atom{vb.ref, {x, o, C(vb.unq), C(vb.ndg)}}, Atom{vb.ct, {o, make_nat(1)}}}});
    return out;
  }();
  return axioms;
}

namespace {

// ---------------------------------------------------------------------------
// Guard matching.
//
// Guard atoms are satisfied one at a time (depth-first over all candidates):
// by copying a banged fact, by consuming a linear atom, by consuming an atom
// produced by an earlier axiom application, or by applying a conversion axiom
// whose right-hand side covers the goal (its left-hand side then becomes a
// chain of subgoals). Metavariables are the guard's bound variables plus
// per-application axiom variables; store atoms are ground.
// ---------------------------------------------------------------------------

struct Matcher {
  const Store& store;
  const Guard& guard;
  const std::vector<Axiom>& axioms = permission_axioms();

  Matcher(const Store& s, const Guard& g) : store(s), guard(g) {}

  std::vector<char> linear_used;      // parallel to store.linear
  std::vector<Atom> pending;          // axiom-produced, possibly with metavars
  std::vector<char> pending_used;
  Subst subst;
  std::unordered_set<std::uint32_t> metavars;
  std::uint32_t next_scratch = kScratchVarBase;
  int budget = 0;
  std::vector<std::string> axioms_used;

  using MatchKey = std::tuple<std::vector<std::pair<Term, Term>>,
                              std::vector<Atom>, std::vector<Atom>>;
  std::vector<Match> results;
  std::set<MatchKey> seen;

  bool is_meta(Term t) const {
    return t.kind == TermKind::Var && metavars.count(t.id) > 0;
  }

  Term walk(Term t) const { return subst.apply(t); }

  bool contains_meta(Term t) const {
    t = walk(t);
    if (t.kind == TermKind::Succ) return true;  // unresolved numeric pattern
    return is_meta(t);
  }

  bool atom_ground(const Atom& a) const {
    for (Term t : a.args)
      if (contains_meta(t)) return false;
    return true;
  }

  // Unifies two terms under the current bindings, recording new bindings in
  // `trail` so they can be undone.
  bool unify(Term a, Term b, std::vector<Term>& trail) {
    a = walk(a);
    b = walk(b);
    if (a == b) return true;
    if (a.kind == TermKind::Var && is_meta(a)) return bind(a, b, trail);
    if (b.kind == TermKind::Var && is_meta(b)) return bind(b, a, trail);
    if (a.kind == TermKind::Succ || b.kind == TermKind::Succ) {
      if (a.kind != TermKind::Succ) std::swap(a, b);
      Term inner = make_var(a.id);
      if (b.kind == TermKind::Nat) {
        if (b.id == 0) return false;
        return unify(inner, make_nat(b.id - 1), trail);
      }
      if (b.kind == TermKind::Succ) return unify(inner, make_var(b.id), trail);
      return false;
    }
    return false;
  }

  bool bind(Term var, Term value, std::vector<Term>& trail) {
    if (value.kind == TermKind::Succ && value.id == var.id) return false;
    subst.bind(var, value);
    trail.push_back(var);
    return true;
  }

  void undo(std::vector<Term>& trail, std::size_t mark) {
    while (trail.size() > mark) {
      // Rebuild the bindings without the popped variables.
      Term v = trail.back();
      trail.pop_back();
      Subst next;
      for (const auto& [k, val] : subst.entries())
        if (!(k == v)) next.bind(k, val);
      subst = std::move(next);
    }
  }

  bool unify_atoms(const Atom& pat, const Atom& cand, std::vector<Term>& trail) {
    if (pat.pred != cand.pred || pat.args.size() != cand.args.size())
      return false;
    for (std::size_t i = 0; i < pat.args.size(); ++i)
      if (!unify(pat.args[i], cand.args[i], trail)) return false;
    return true;
  }

  using Cont = std::function<void()>;

  void solve(std::size_t goal_idx) {
    if (goal_idx == guard.atoms.size()) {
      finalize();
      return;
    }
    const Atom& goal = guard.atoms[goal_idx];
    satisfy(goal, [&] { solve(goal_idx + 1); });
  }

  // Tries every way to satisfy one atom, invoking `next` on success.
  void satisfy(const Atom& goal, const Cont& next) {
    std::vector<Term> trail;
    // 1. Copy a banged fact (never consumed).
    for (const Atom& b : store.banged) {
      std::size_t mark = trail.size();
      if (unify_atoms(goal, b, trail)) next();
      undo(trail, mark);
    }
    // 2. Consume a linear atom, unless the same fact is also banged (a banged
    //    fact must never be consumed destructively through its linear shadow).
    for (std::size_t i = 0; i < store.linear.size(); ++i) {
      if (linear_used[i]) continue;
      if (i > 0 && !linear_used[i - 1] && store.linear[i] == store.linear[i - 1])
        continue;  // identical multiset entries give identical matches
      if (store.has_banged(store.linear[i])) continue;
      std::size_t mark = trail.size();
      if (unify_atoms(goal, store.linear[i], trail)) {
        linear_used[i] = 1;
        next();
        linear_used[i] = 0;
      }
      undo(trail, mark);
    }
    // 3. Consume an atom produced by an earlier axiom application.
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (pending_used[i]) continue;
      std::size_t mark = trail.size();
      if (unify_atoms(goal, pending[i], trail)) {
        pending_used[i] = 1;
        next();
        pending_used[i] = 0;
      }
      undo(trail, mark);
    }
    // 4. Derive the goal with a conversion axiom; its lhs becomes subgoals.
    if (budget > 0) {
      for (const Axiom& ax : axioms) {
        for (std::size_t r = 0; r < ax.rhs.size(); ++r) {
          // Instantiate the axiom with fresh scratch variables.
          Subst inst;
          for (Term v : ax.vars) {
            Term sv = make_var(next_scratch);
            metavars.insert(sv.id);
            inst.bind(v, sv);
            ++next_scratch;
          }
          std::vector<Term> trail2;
          Atom head = inst.apply(ax.rhs[r]);
          if (!unify_atoms(goal, head, trail2)) {
            undo(trail2, 0);
            continue;
          }
          --budget;
          axioms_used.push_back(ax.name);
          // The application's remaining products join the pool locked: they
          // become consumable only once its own lhs has been derived from
          // other resources, never circularly by that lhs itself.
          std::size_t pend_mark = pending.size();
          std::vector<std::size_t> produced;
          for (std::size_t j = 0; j < ax.rhs.size(); ++j) {
            if (j == r) continue;
            produced.push_back(pending.size());
            pending.push_back(inst.apply(ax.rhs[j]));
            pending_used.push_back(1);
          }
          // Chain the lhs subgoals, then continue with the caller's goals.
          satisfy_all(ax.lhs, inst, 0, [&] {
            for (std::size_t k : produced) pending_used[k] = 0;
            next();
            for (std::size_t k : produced) pending_used[k] = 1;
          });
          pending.resize(pend_mark);
          pending_used.resize(pend_mark);
          axioms_used.pop_back();
          ++budget;
          undo(trail2, 0);
        }
      }
    }
  }

  void satisfy_all(const std::vector<Atom>& pats, const Subst& inst,
                   std::size_t idx, const Cont& next) {
    if (idx == pats.size()) {
      next();
      return;
    }
    satisfy(inst.apply(pats[idx]),
            [&] { satisfy_all(pats, inst, idx + 1, next); });
  }

  void finalize() {
    // Every bound variable must be grounded by terms from the store.
    std::vector<std::pair<Term, Term>> bindings;
    for (Term v : guard.bound) {
      Term val = walk(v);
      if (contains_meta(val) || val == v) return;
      bindings.emplace_back(v, val);
    }
    // Leftover axiom products must be ground too; they join the residual.
    Store residual;
    residual.banged = store.banged;
    for (std::size_t i = 0; i < store.linear.size(); ++i)
      if (!linear_used[i]) residual.linear.push_back(store.linear[i]);
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (pending_used[i]) continue;
      Atom a = subst.apply(pending[i]);
      if (!atom_ground(a)) return;
      residual.linear.push_back(std::move(a));
    }
    residual.normalize();
    if (!seen.emplace(bindings, residual.linear, residual.banged).second)
      return;
    Match m;
    for (const auto& [k, v] : bindings) m.subst.bind(k, v);
    m.residual = std::move(residual);
    m.axioms_used = axioms_used;
    results.push_back(std::move(m));
  }
};

}  // namespace

std::vector<Match> match_guard(const Store& s, const Guard& g) {
  Matcher m{s, g};
  m.linear_used.assign(s.linear.size(), 0);
  for (Term v : g.bound) {
    assert(v.kind == TermKind::Var);
    m.metavars.insert(v.id);
  }
  const Vocab& vb = Vocab::get();
  int refs = 0;
  for (const Atom& a : g.atoms)
    if (a.pred == vb.ref) ++refs;
  m.budget = 2 * refs;
  m.solve(0);

  std::sort(m.results.begin(), m.results.end(),
            [](const Match& a, const Match& b) {
              if (a.subst.entries() != b.subst.entries())
                return a.subst.entries() < b.subst.entries();
              if (a.residual.linear != b.residual.linear)
                return a.residual.linear < b.residual.linear;
              if (a.residual.banged != b.residual.banged)
                return a.residual.banged < b.residual.banged;
              return a.axioms_used < b.axioms_used;
            });
  return m.results;
}

// ---------------------------------------------------------------------------
// Canonicalization: partition refinement over hidden variables plus a
// tie-break search that individualizes ambiguous variables and keeps the
// lexicographically smallest rendering.
// ---------------------------------------------------------------------------

namespace {

// Immutable per-call indexing of the store: atoms, dense ids for the
// refinable hidden variables, flattened atom codes and occurrence lists.
struct CanonCore {
  std::vector<std::pair<bool, const Atom*>> atoms;

  // Refinable hidden vars (multi-occurrence), sorted; dense index = position.
  std::vector<std::uint32_t> ids;
  // Hidden vars occurring exactly once are pure placeholders: they carry no
  // identity (any renaming bijection maps one to any other), so they render
  // as "#_" and are never refined or individualized.
  std::vector<std::uint32_t> once;

  // Flat atom codes: row i = acode[aoff[i]..aoff[i+1]) holding
  // [banged tag, pred, arg codes...]; refinable hidden args hold
  // kHidden | dense and are resolved against the current coloring.
  std::vector<std::uint64_t> acode;
  std::vector<std::uint32_t> aoff;

  // Per dense var: (atom index, arg position) occurrences, flattened.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> occ;
  std::vector<std::uint32_t> ooff;

  static constexpr std::uint64_t kHidden = 0x4000'0000'0000'0000ull;
  static constexpr std::uint64_t kOnce = 0x2000'0000'0000'0000ull;
  static constexpr std::uint64_t kUnfixed = 1ull << 32;

  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }

  static bool contains(const std::vector<std::uint32_t>& sorted,
                       std::uint32_t v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    return it != sorted.end() && *it == v;
  }

  int dense_of(std::uint32_t id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it != ids.end() && *it == id) return static_cast<int>(it - ids.begin());
    return -1;
  }

  void build(const std::vector<Term>& hidden_vars) {
    std::vector<std::uint32_t> hidden;
    hidden.reserve(hidden_vars.size());
    for (Term t : hidden_vars)
      if (t.kind == TermKind::Var) hidden.push_back(t.id);
    std::sort(hidden.begin(), hidden.end());
    hidden.erase(std::unique(hidden.begin(), hidden.end()), hidden.end());

    // Occurrence counts of hidden vars, via sort instead of hashing.
    std::vector<std::uint32_t> occs;
    for (const auto& [banged, atom] : atoms) {
      (void)banged;
      for (Term arg : atom->args)
        if (arg.kind == TermKind::Var && contains(hidden, arg.id))
          occs.push_back(arg.id);
    }
    std::sort(occs.begin(), occs.end());
    for (std::size_t i = 0; i < occs.size();) {
      std::size_t j = i;
      while (j < occs.size() && occs[j] == occs[i]) ++j;
      if (j - i == 1)
        once.push_back(occs[i]);
      else
        ids.push_back(occs[i]);
      i = j;
    }

    // Flat atom codes plus occurrence lists (two passes: count, fill).
    std::vector<std::uint32_t> counts(ids.size(), 0);
    aoff.reserve(atoms.size() + 1);
    for (const auto& [banged, atom] : atoms) {
      aoff.push_back(static_cast<std::uint32_t>(acode.size()));
      acode.push_back(banged ? 7 : 3);
      acode.push_back(atom->pred);
      for (Term arg : atom->args) {
        if (arg.kind == TermKind::Var) {
          if (contains(once, arg.id)) {
            acode.push_back(kOnce);
            continue;
          }
          int d = dense_of(arg.id);
          if (d >= 0) {
            acode.push_back(kHidden | static_cast<std::uint32_t>(d));
            ++counts[d];
            continue;
          }
        }
        acode.push_back((static_cast<std::uint64_t>(arg.kind) << 32) | arg.id);
      }
    }
    aoff.push_back(static_cast<std::uint32_t>(acode.size()));

    ooff.assign(ids.size() + 1, 0);
    for (std::size_t d = 0; d < ids.size(); ++d)
      ooff[d + 1] = ooff[d] + counts[d];
    occ.resize(ooff.back());
    std::vector<std::uint32_t> cursor(ooff.begin(), ooff.end() - 1);
    for (std::uint32_t i = 0; i < atoms.size(); ++i) {
      const Atom* atom = atoms[i].second;
      for (std::uint32_t j = 0; j < atom->args.size(); ++j) {
        std::uint64_t code = acode[aoff[i] + 2 + j];
        if (code >= kHidden && code < (kHidden << 1)) {
          std::uint32_t d = static_cast<std::uint32_t>(code & 0xFFFF'FFFFull);
          occ[cursor[d]++] = {i, j};
        }
      }
    }
  }

  std::uint64_t code_at(std::uint64_t raw,
                        const std::vector<std::uint64_t>& color) const {
    if (raw >= kHidden && raw < (kHidden << 1))
      return kHidden | color[raw & 0xFFFF'FFFFull];
    return raw;
  }

  void refine(std::vector<std::uint64_t>& color) const {
    std::vector<std::uint64_t> next(color.size());
    std::vector<std::uint64_t> sig;
    for (std::size_t round = 0; round < color.size() + 1; ++round) {
      for (std::uint32_t v = 0; v < color.size(); ++v) {
        sig.clear();
        for (std::uint32_t k = ooff[v]; k < ooff[v + 1]; ++k) {
          auto [ai, pos] = occ[k];
          std::uint64_t h = acode[aoff[ai]];
          h = mix(h, acode[aoff[ai] + 1]);
          h = mix(h, pos);
          for (std::uint32_t c = aoff[ai] + 2; c < aoff[ai + 1]; ++c)
            h = mix(h, code_at(acode[c], color));
          sig.push_back(h);
        }
        std::sort(sig.begin(), sig.end());
        std::uint64_t h = mix(11, color[v]);
        for (auto s : sig) h = mix(h, s);
        next[v] = kUnfixed | (h & 0xFFFF'FFFFull);
      }
      // Keep individualized colors stable across rounds.
      for (std::uint32_t v = 0; v < color.size(); ++v)
        if (color[v] < kUnfixed) next[v] = color[v];
      if (next == color) break;
      color = next;
    }
  }

  // Members of the smallest-colored non-individualized class with more than
  // one element (dense indices); empty when the coloring is discrete.
  std::vector<std::uint32_t> ambiguous_class(
      const std::vector<std::uint64_t>& color) const {
    std::map<std::uint64_t, std::vector<std::uint32_t>> classes;
    for (std::uint32_t v = 0; v < color.size(); ++v)
      if (color[v] >= kUnfixed) classes[color[v]].push_back(v);
    for (auto& [c, vs] : classes)
      if (vs.size() > 1) return vs;
    return {};
  }

  std::string render(const std::vector<std::uint64_t>& color,
                     const NameSpace& ns) const {
    // Total order on refinable hidden vars by color; rename to indices.
    std::vector<std::pair<std::uint64_t, std::uint32_t>> order;
    order.reserve(color.size());
    for (std::uint32_t v = 0; v < color.size(); ++v)
      order.emplace_back(color[v], v);
    std::sort(order.begin(), order.end());
    std::vector<int> index(color.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      index[order[i].second] = static_cast<int>(i);

    std::string buf;
    auto term_str = [&](Term t) {
      if (t.kind == TermKind::Var) {
        if (contains(once, t.id)) {
          buf += "#_";
          return;
        }
        int d = dense_of(t.id);
        if (d >= 0) {
          buf += '#';
          buf += std::to_string(index[d]);
          return;
        }
        buf += '$';
        buf += std::to_string(t.id);
        return;
      }
      switch (t.kind) {
        case TermKind::Const:
          buf += symbol_name(t.id);
          return;
        case TermKind::Nat:
          buf += std::to_string(t.id);
          return;
        default:
          buf += '$';
          buf += std::to_string(t.id);
          return;
      }
    };
    std::vector<std::pair<std::uint32_t, std::uint32_t>> lines;
    lines.reserve(atoms.size());
    for (const auto& [banged, atom] : atoms) {
      std::uint32_t start = static_cast<std::uint32_t>(buf.size());
      if (banged) buf += '!';
      buf += symbol_name(atom->pred);
      buf += '(';
      for (std::size_t i = 0; i < atom->args.size(); ++i) {
        if (i) buf += ',';
        term_str(atom->args[i]);
      }
      buf += ')';
      lines.emplace_back(start, static_cast<std::uint32_t>(buf.size() - start));
    }
    std::string_view all = buf;
    std::sort(lines.begin(), lines.end(),
              [&](const auto& a, const auto& b) {
                return all.substr(a.first, a.second) <
                       all.substr(b.first, b.second);
              });
    std::string out;
    out.reserve(buf.size() + lines.size());
    for (auto [start, len] : lines) {
      out.append(all.substr(start, len));
      out += ';';
    }
    return out;
  }

  std::string search(std::vector<std::uint64_t>& color, int fixed,
                     const NameSpace& ns) const {
    refine(color);
    std::vector<std::uint32_t> cls = ambiguous_class(color);
    if (cls.empty()) return render(color, ns);
    std::string best;
    for (std::uint32_t v : cls) {
      std::vector<std::uint64_t> copy = color;
      copy[v] = static_cast<std::uint64_t>(fixed);
      std::string key = search(copy, fixed + 1, ns);
      if (best.empty() || key < best) best = key;
    }
    return best;
  }
};
}  // namespace

std::string canonicalize(const Store& s, const std::vector<Term>& hidden,
                         const NameSpace& ns) {
  Canon c;
  c.atoms.reserve(s.linear.size() + s.banged.size());
  for (const Atom& a : s.linear) c.atoms.emplace_back(false, &a);
  for (const Atom& a : s.banged) c.atoms.emplace_back(true, &a);
  c.build(hidden);
  return c.search(ns);
}

std::string render_store(const Store& s, const NameSpace& ns) {
  std::string out;
  for (const Atom& a : s.linear) {
    if (!out.empty()) out += ", ";
    out += render_atom(a, ns);
  }
  for (const Atom& a : s.banged) {
    if (!out.empty()) out += ", ";
    out += render_atom(a, ns, /*banged=*/true);
  }
  return out;
}

}  // namespace permflow
