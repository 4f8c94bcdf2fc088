#include "permflow/process.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace permflow {

namespace {

std::shared_ptr<Process> blank(ProcKind k) {
  auto p = std::make_shared<Process>();
  p->kind = k;
  return p;
}

}  // namespace

PProc p_tell(std::vector<Atom> atoms, std::vector<Atom> banged) {
  auto p = blank(ProcKind::Tell);
  p->tells = std::move(atoms);
  p->banged_tells = std::move(banged);
  return p;
}

PProc p_ask(std::vector<Term> bound, std::vector<Atom> guard, PProc body) {
  return p_choice({ProcBranch{std::move(bound), std::move(guard), std::move(body)}});
}

PProc p_choice(std::vector<ProcBranch> branches) {
  auto p = blank(ProcKind::Choice);
  p->branches = std::move(branches);
  return p;
}

PProc p_par(std::vector<PProc> kids) {
  auto p = blank(ProcKind::Par);
  p->kids = std::move(kids);
  return p;
}

PProc p_local(std::vector<Term> decls, PProc body) {
  auto p = blank(ProcKind::Local);
  p->decls = std::move(decls);
  p->left = std::move(body);
  return p;
}

PProc p_call(Symbol callee, std::vector<Term> args) {
  auto p = blank(ProcKind::Call);
  p->callee = callee;
  p->args = std::move(args);
  return p;
}

PProc p_seq(PProc first, PProc second) {
  auto p = blank(ProcKind::Seq);
  p->left = std::move(first);
  p->right = std::move(second);
  return p;
}

void DefTable::add(Def d) {
  assert(find(d.name) == nullptr);
  defs_.push_back(std::move(d));
}

const Def* DefTable::find(Symbol name) const {
  for (const Def& d : defs_)
    if (d.name == name) return &d;
  return nullptr;
}

namespace {

Subst without(const Subst& s, const std::vector<Term>& shadowed) {
  Subst out;
  for (const auto& [k, v] : s.entries()) {
    bool hit = false;
    for (Term t : shadowed)
      if (t == k) hit = true;
    if (!hit) out.bind(k, v);
  }
  return out;
}

std::vector<Atom> subst_atoms(const std::vector<Atom>& atoms, const Subst& s) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(s.apply(a));
  return out;
}

}  // namespace

PProc subst_process(const PProc& p, const Subst& s) {
  if (s.size() == 0) return p;
  switch (p->kind) {
    case ProcKind::Tell:
      return p_tell(subst_atoms(p->tells, s), subst_atoms(p->banged_tells, s));
    case ProcKind::Choice: {
      std::vector<ProcBranch> bs;
      bs.reserve(p->branches.size());
      for (const ProcBranch& b : p->branches) {
        Subst inner = without(s, b.bound);
        bs.push_back(ProcBranch{b.bound, subst_atoms(b.guard, inner),
                                subst_process(b.body, inner)});
      }
      return p_choice(std::move(bs));
    }
    case ProcKind::Par: {
      std::vector<PProc> kids;
      kids.reserve(p->kids.size());
      for (const PProc& k : p->kids) kids.push_back(subst_process(k, s));
      return p_par(std::move(kids));
    }
    case ProcKind::Local: {
      Subst inner = without(s, p->decls);
      return p_local(p->decls, subst_process(p->left, inner));
    }
    case ProcKind::Call: {
      std::vector<Term> args;
      args.reserve(p->args.size());
      for (Term a : p->args) args.push_back(s.apply(a));
      return p_call(p->callee, std::move(args));
    }
    case ProcKind::Seq:
      return p_seq(subst_process(p->left, s), subst_process(p->right, s));
  }
  return p;
}

namespace {

Atom sync_atom(Term z) {
  return Atom{Vocab::get().sync, {z}};
}

PProc desugar_rec(const PProc& p, NameSpace& ns) {
  switch (p->kind) {
    case ProcKind::Tell:
    case ProcKind::Call:
      return p;
    case ProcKind::Choice: {
      std::vector<ProcBranch> bs;
      for (const ProcBranch& b : p->branches)
        bs.push_back(ProcBranch{b.bound, b.guard, desugar_rec(b.body, ns)});
      return p_choice(std::move(bs));
    }
    case ProcKind::Par: {
      std::vector<PProc> kids;
      for (const PProc& k : p->kids) kids.push_back(desugar_rec(k, ns));
      return p_par(std::move(kids));
    }
    case ProcKind::Local:
      return p_local(p->decls, desugar_rec(p->left, ns));
    case ProcKind::Seq: {
      Term w = ns.fresh("W");
      return p_local({w}, p_par({completing(p->left, w, ns),
                                 p_ask({}, {sync_atom(w)},
                                       desugar_rec(p->right, ns))}));
    }
  }
  return p;
}

}  // namespace

PProc completing(const PProc& p, Term z, NameSpace& ns) {
  switch (p->kind) {
    case ProcKind::Tell: {
      std::vector<Atom> atoms = p->tells;
      atoms.push_back(sync_atom(z));
      return p_tell(std::move(atoms), p->banged_tells);
    }
    case ProcKind::Choice: {
      std::vector<ProcBranch> bs;
      for (const ProcBranch& b : p->branches)
        bs.push_back(ProcBranch{b.bound, b.guard, completing(b.body, z, ns)});
      return p_choice(std::move(bs));
    }
    case ProcKind::Par: {
      if (p->kids.empty()) return p_tell({sync_atom(z)});
      if (p->kids.size() == 1) return completing(p->kids[0], z, ns);
      std::vector<Term> ws;
      std::vector<PProc> kids;
      std::vector<Atom> joins;
      for (const PProc& k : p->kids) {
        Term w = ns.fresh("W");
        ws.push_back(w);
        kids.push_back(completing(k, w, ns));
        joins.push_back(sync_atom(w));
      }
      kids.push_back(p_ask({}, std::move(joins), p_tell({sync_atom(z)})));
      return p_local(std::move(ws), p_par(std::move(kids)));
    }
    case ProcKind::Local:
      return p_local(p->decls, completing(p->left, z, ns));
    case ProcKind::Seq: {
      Term w = ns.fresh("W");
      return p_local({w}, p_par({completing(p->left, w, ns),
                                 p_ask({}, {sync_atom(w)},
                                       completing(p->right, z, ns))}));
    }
    case ProcKind::Call:
      // Call completion is signaled through the definition's own sync/end
      // protocol; the encoder never places a bare call left of a sequence.
      throw std::logic_error("call on the left of a sequential composition");
  }
  return p;
}

PProc desugar(const PProc& p, NameSpace& ns) { return desugar_rec(p, ns); }

void desugar_defs(DefTable& defs, NameSpace& ns) {
  DefTable out;
  for (const Def& d : defs.all())
    out.add(Def{d.name, d.params, desugar_rec(d.body, ns)});
  defs = std::move(out);
}

namespace {

std::string pad(int indent) { return std::string(indent * 2, ' '); }

std::string render_guard(const std::vector<Atom>& guard, const NameSpace& ns) {
  if (guard.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < guard.size(); ++i) {
    if (i) out += " & ";
    out += render_atom(guard[i], ns);
  }
  return out;
}

}  // namespace

std::string render_process(const PProc& p, const NameSpace& ns, int indent) {
  std::string in = pad(indent);
  switch (p->kind) {
    case ProcKind::Tell: {
      if (p->tells.empty() && p->banged_tells.empty()) return in + "ltell 1";
      std::string out = in + "ltell ";
      bool first = true;
      for (const Atom& a : p->tells) {
        if (!first) out += " & ";
        out += render_atom(a, ns);
        first = false;
      }
      for (const Atom& a : p->banged_tells) {
        if (!first) out += " & ";
        out += render_atom(a, ns, /*banged=*/true);
        first = false;
      }
      return out;
    }
    case ProcKind::Choice: {
      std::string out;
      for (std::size_t i = 0; i < p->branches.size(); ++i) {
        const ProcBranch& b = p->branches[i];
        out += in + (i ? "+ ask " : "ask ") + render_guard(b.guard, ns) +
               " then\n" + render_process(b.body, ns, indent + 1);
        if (i + 1 < p->branches.size()) out += "\n";
      }
      return out;
    }
    case ProcKind::Par: {
      std::string out = in + "par {\n";
      for (const PProc& k : p->kids) out += render_process(k, ns, indent + 1) + "\n";
      return out + in + "}";
    }
    case ProcKind::Local: {
      std::string out = in + "local ";
      for (std::size_t i = 0; i < p->decls.size(); ++i) {
        if (i) out += ", ";
        out += render_term(p->decls[i], ns);
      }
      out += " in\n" + render_process(p->left, ns, indent + 1);
      return out;
    }
    case ProcKind::Call: {
      std::string out = in + symbol_name(p->callee) + "(";
      for (std::size_t i = 0; i < p->args.size(); ++i) {
        if (i) out += ",";
        out += render_term(p->args[i], ns);
      }
      return out + ")";
    }
    case ProcKind::Seq:
      return render_process(p->left, ns, indent) + ";\n" +
             render_process(p->right, ns, indent);
  }
  return in;
}

std::string render_blocked(const PProc& p, const NameSpace& ns) {
  if (p->kind != ProcKind::Choice) return "ask ? then ...";
  std::string out;
  for (std::size_t i = 0; i < p->branches.size(); ++i) {
    if (i) out += " + ";
    out += "ask " + render_guard(p->branches[i].guard, ns) + " then ...";
  }
  return out;
}

}  // namespace permflow
