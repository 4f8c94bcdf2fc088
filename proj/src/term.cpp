#include "permflow/term.hpp"

#include <cassert>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace permflow {

namespace {

struct SymbolTable {
  std::vector<std::string> names;
  std::unordered_map<std::string, Symbol> ids;
  std::mutex mu;
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

}  // namespace

Symbol intern(std::string_view name) {
  auto& t = table();
  std::scoped_lock lock(t.mu);
  auto it = t.ids.find(std::string(name));
  if (it != t.ids.end()) return it->second;
  Symbol id = static_cast<Symbol>(t.names.size());
  t.names.emplace_back(name);
  t.ids.emplace(t.names.back(), id);
  return id;
}

const std::string& symbol_name(Symbol s) {
  auto& t = table();
  std::scoped_lock lock(t.mu);
  return t.names.at(s);
}

Term make_const(std::string_view name) { return make_const(intern(name)); }

Atom make_atom(std::string_view pred, std::vector<Term> args) {
  return Atom{intern(pred), std::move(args)};
}

Term NameSpace::fresh(std::string_view base, int line) {
  vars_.push_back(VarInfo{intern(base), line});
  return make_var(static_cast<std::uint32_t>(vars_.size() - 1));
}

Term NameSpace::fresh_like(Term v, const NameSpace& source) {
  assert(v.kind == TermKind::Var && !is_scratch_var(v));
  vars_.push_back(source.vars_.at(v.id));
  return make_var(static_cast<std::uint32_t>(vars_.size() - 1));
}

void NameSpace::pad_resize(std::size_t n) {
  static const Symbol pad = intern("pad");
  vars_.resize(n, VarInfo{pad, -1});
}

const std::string& NameSpace::base(Term v) const {
  assert(v.kind == TermKind::Var && !is_scratch_var(v));
  return symbol_name(vars_.at(v.id).base);
}

int NameSpace::line(Term v) const {
  assert(v.kind == TermKind::Var && !is_scratch_var(v));
  return vars_.at(v.id).line;
}

std::string NameSpace::name(Term v) const {
  return base(v) + "_" + std::to_string(v.id);
}

void Subst::bind(Term var, Term value) {
  assert(var.kind == TermKind::Var);
  for (auto& [k, v] : map_) {
    if (k == var) {
      v = value;
      return;
    }
  }
  map_.emplace_back(var, value);
}

std::optional<Term> Subst::lookup(Term var) const {
  for (const auto& [k, v] : map_)
    if (k == var) return v;
  return std::nullopt;
}

Term Subst::apply(Term t) const {
  switch (t.kind) {
    case TermKind::Const:
    case TermKind::Nat:
      return t;
    case TermKind::Var: {
      if (auto v = lookup(t)) return apply(*v);
      return t;
    }
    case TermKind::Succ: {
      Term inner = apply(make_var(t.id));
      if (inner.kind == TermKind::Nat) return make_nat(inner.id + 1);
      if (inner.kind == TermKind::Var) return make_succ(inner);
      throw std::logic_error("successor applied to a non-numeric term");
    }
  }
  return t;
}

Atom Subst::apply(const Atom& a) const {
  Atom out{a.pred, {}};
  out.args.reserve(a.args.size());
  for (Term t : a.args) out.args.push_back(apply(t));
  return out;
}

std::string render_term(Term t, const NameSpace& ns) {
  const Vocab& vb = Vocab::get();
  switch (t.kind) {
    case TermKind::Const:
      if (t.id == vb.ndg) return "ng";
      return symbol_name(t.id);
    case TermKind::Nat:
      return std::to_string(t.id);
    case TermKind::Var:
      if (is_scratch_var(t)) return "?" + std::to_string(t.id - kScratchVarBase);
      return ns.name(t);
    case TermKind::Succ:
      return "s(" + render_term(make_var(t.id), ns) + ")";
  }
  return "?";
}

namespace {

// sync arguments tagged with a source line render as "line_N (NAME)".
std::string render_sync_arg(Term z, int line, const NameSpace& ns) {
  std::string name = (z.kind == TermKind::Var && !is_scratch_var(z))
                         ? ns.name(z)
                         : render_term(z, ns);
  if (line >= 0) return "line_" + std::to_string(line) + " (" + name + ")";
  return name;
}

}  // namespace

std::string render_atom(const Atom& a, const NameSpace& ns, bool banged) {
  const Vocab& vb = Vocab::get();
  std::string out = banged ? "!" : "";
  out += symbol_name(a.pred);
  // Status tokens fuse their line and sync arguments for display.
  if ((a.pred == vb.act || a.pred == vb.run || a.pred == vb.end) &&
      a.args.size() == 4 && a.args[2].kind == TermKind::Nat) {
    out += "(" + render_term(a.args[0], ns) + "," + render_term(a.args[1], ns) +
           "," + render_sync_arg(a.args[3], static_cast<int>(a.args[2].id), ns) +
           ")";
    return out;
  }
  if (a.pred == vb.sync && a.args.size() == 1 && a.args[0].kind == TermKind::Var &&
      !is_scratch_var(a.args[0])) {
    out += "(" + render_sync_arg(a.args[0], ns.line(a.args[0]), ns) + ")";
    return out;
  }
  out += "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += render_term(a.args[i], ns);
  }
  out += ")";
  return out;
}

const Vocab& Vocab::get() {
  static const Vocab v = [] {
    Vocab x;
    x.ref = intern("ref");
    x.field = intern("field");
    x.gpar = intern("gpar");
    x.sync = intern("sync");
    x.act = intern("act");
    x.run = intern("run");
    x.end = intern("end");
    x.ct = intern("ct");
    x.dg = intern("dg");
    x.env = intern("env");
    x.ok = intern("ok");
    x.unq = intern("unq");
    x.shr = intern("shr");
    x.imm = intern("imm");
    x.none = intern("none");
    x.atm = intern("atm");
    x.conc = intern("conc");
    x.nil = intern("nil");
    x.ndg = intern("ndg");
    x.nst = intern("nst");
    x.block = intern("block");
    x.assg = intern("assg");
    x.dflt = intern("default");
    return x;
  }();
  return v;
}

}  // namespace permflow
