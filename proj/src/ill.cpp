#include "permflow/ill.hpp"

#include <cassert>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

#include "permflow/store.hpp"

namespace permflow {

// ---------------------------------------------------------------------------
// Builders

namespace {

std::shared_ptr<Formula> mk(FormulaKind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}

}  // namespace

PFormula f_atom(Atom a) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::AtomF;
  f->atom = std::move(a);
  return f;
}

PFormula f_one() {
  static const PFormula one = mk(FormulaKind::One);
  return one;
}

PFormula f_top() {
  static const PFormula top = mk(FormulaKind::Top);
  return top;
}

PFormula f_tensor(std::vector<PFormula> kids) {
  std::vector<PFormula> keep;
  for (PFormula& k : kids) {
    if (k->kind == FormulaKind::One) continue;
    if (k->kind == FormulaKind::Tensor) {
      keep.insert(keep.end(), k->kids.begin(), k->kids.end());
      continue;
    }
    keep.push_back(std::move(k));
  }
  if (keep.empty()) return f_one();
  if (keep.size() == 1) return keep[0];
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Tensor;
  f->kids = std::move(keep);
  return f;
}

PFormula f_with(std::vector<PFormula> kids) {
  assert(!kids.empty());
  if (kids.size() == 1) return kids[0];
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::With;
  f->kids = std::move(kids);
  return f;
}

PFormula f_lolli(PFormula lhs, PFormula rhs) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Lolli;
  f->kids = {std::move(lhs), std::move(rhs)};
  return f;
}

PFormula f_exists(std::vector<Term> vars, PFormula body) {
  if (vars.empty()) return body;
  if (body->kind == FormulaKind::Exists) {
    std::vector<Term> all = std::move(vars);
    all.insert(all.end(), body->vars.begin(), body->vars.end());
    return f_exists(std::move(all), body->body);
  }
  auto g = mk(FormulaKind::Exists);
  g->vars = std::move(vars);
  g->body = std::move(body);
  return g;
}

PFormula f_forall(std::vector<Term> vars, PFormula body) {
  if (vars.empty()) return body;
  auto g = std::make_shared<Formula>();
  g->kind = FormulaKind::Forall;
  g->vars = std::move(vars);
  g->body = std::move(body);
  return g;
}

PFormula f_bang(PFormula body) {
  auto g = std::make_shared<Formula>();
  g->kind = FormulaKind::Bang;
  g->body = std::move(body);
  return g;
}

bool formula_equal(const PFormula& a, const PFormula& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::AtomF:
      return a->atom == b->atom;
    case FormulaKind::One:
    case FormulaKind::Top:
      return true;
    case FormulaKind::Tensor:
    case FormulaKind::With:
    case FormulaKind::Lolli: {
      if (a->kids.size() != b->kids.size()) return false;
      for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!formula_equal(a->kids[i], b->kids[i])) return false;
      return true;
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return a->vars == b->vars && formula_equal(a->body, b->body);
    case FormulaKind::Bang:
      return formula_equal(a->body, b->body);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Process reading

namespace {

PFormula tell_formula(const PProc& p) {
  std::vector<PFormula> parts;
  for (const Atom& a : p->tells) parts.push_back(f_atom(a));
  for (const Atom& a : p->banged_tells) parts.push_back(f_bang(f_atom(a)));
  return f_tensor(std::move(parts));
}

}  // namespace

PFormula to_ill(const PProc& p) {
  switch (p->kind) {
    case ProcKind::Tell:
      return tell_formula(p);
    case ProcKind::Choice: {
      std::vector<PFormula> branches;
      for (const ProcBranch& b : p->branches) {
        std::vector<PFormula> guard;
        for (const Atom& a : b.guard) guard.push_back(f_atom(a));
        branches.push_back(f_forall(
            b.bound, f_lolli(f_tensor(std::move(guard)), to_ill(b.body))));
      }
      return f_with(std::move(branches));
    }
    case ProcKind::Par: {
      std::vector<PFormula> kids;
      for (const PProc& k : p->kids) kids.push_back(to_ill(k));
      return f_tensor(std::move(kids));
    }
    case ProcKind::Local:
      return f_exists(p->decls, to_ill(p->left));
    case ProcKind::Call:
      return f_atom(Atom{p->callee, p->args});
    case ProcKind::Seq:
      throw std::logic_error("to_ill requires a desugared process");
  }
  throw std::logic_error("bad process");
}

Theory make_theory(const DefTable& defs) {
  Theory th;
  for (const Axiom& ax : permission_axioms()) {
    std::vector<PFormula> lhs, rhs;
    for (const Atom& a : ax.lhs) lhs.push_back(f_atom(a));
    for (const Atom& a : ax.rhs) rhs.push_back(f_atom(a));
    th.clauses.push_back(f_bang(f_forall(
        ax.vars, f_lolli(f_tensor(std::move(lhs)), f_tensor(std::move(rhs))))));
  }
  for (const Def& d : defs.all())
    th.clauses.push_back(f_bang(f_forall(
        d.params, f_lolli(f_atom(Atom{d.name, d.params}), to_ill(d.body)))));
  return th;
}

// ---------------------------------------------------------------------------
// Depth calculus

namespace {

struct CompCtx {
  const DefTable& defs;
  std::set<Symbol> unfolding;
  std::map<Symbol, int> memo;
};

int comp_rec(const PProc& p, CompCtx& cx);

int comp_sc_rec(const PProc& p, CompCtx& cx) {
  if (p->kind != ProcKind::Par) return comp_rec(p, cx);
  // Under a sequential wrapper the group pays one extra phase for the join
  // that signals its completion; singleton groups collapse and pay nothing.
  if (p->kids.empty()) return 0;
  if (p->kids.size() == 1) return comp_sc_rec(p->kids[0], cx);
  int total = 1;
  for (const PProc& k : p->kids) total += comp_sc_rec(k, cx);
  return total;
}

int comp_rec(const PProc& p, CompCtx& cx) {
  switch (p->kind) {
    case ProcKind::Tell:
      return 0;
    case ProcKind::Choice: {
      const Vocab& vb = Vocab::get();
      bool all_dg = !p->branches.empty();
      for (const ProcBranch& b : p->branches) {
        if (b.guard.empty()) all_dg = false;
        for (const Atom& a : b.guard)
          if (a.pred != vb.dg) all_dg = false;
      }
      if (all_dg) {
        int atoms = 0;
        for (const ProcBranch& b : p->branches)
          atoms = std::max(atoms, static_cast<int>(b.guard.size()));
        return atoms;
      }
      int deepest = 0;
      for (const ProcBranch& b : p->branches)
        deepest = std::max(deepest, comp_rec(b.body, cx));
      return 1 + deepest;
    }
    case ProcKind::Par: {
      int total = 0;
      for (const PProc& k : p->kids) total += comp_rec(k, cx);
      return total;
    }
    case ProcKind::Local:
      return comp_rec(p->left, cx);
    case ProcKind::Call: {
      auto it = cx.memo.find(p->callee);
      if (it != cx.memo.end()) return 1 + it->second;
      if (!cx.unfolding.insert(p->callee).second)
        throw std::runtime_error("cyclic definition: " +
                                 symbol_name(p->callee));
      const Def* d = cx.defs.find(p->callee);
      if (d == nullptr)
        throw std::runtime_error("undefined process: " +
                                 symbol_name(p->callee));
      int body = comp_rec(d->body, cx);
      cx.unfolding.erase(p->callee);
      cx.memo.emplace(p->callee, body);
      return 1 + body;
    }
    case ProcKind::Seq:
      return 1 + comp_sc_rec(p->left, cx) + comp_rec(p->right, cx);
  }
  throw std::logic_error("bad process");
}

}  // namespace

int comp(const PProc& p, const DefTable& defs) {
  CompCtx cx{defs, {}, {}};
  return comp_rec(p, cx);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string plain_term(Term t, const NameSpace& ns) {
  switch (t.kind) {
    case TermKind::Const:
      if (t.id == Vocab::get().ndg) return "ng";
      return symbol_name(t.id);
    case TermKind::Var:
      return ns.name(t);
    case TermKind::Nat:
      return std::to_string(t.id);
    case TermKind::Succ:
      return "s(" + ns.name(make_var(t.id)) + ")";
  }
  return "?";
}

std::string plain_atom(const Atom& a, const NameSpace& ns) {
  std::string out = symbol_name(a.pred);
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ',';
    out += plain_term(a.args[i], ns);
  }
  out += ')';
  return out;
}

void render_rec(const PFormula& f, const NameSpace& ns, std::string& out) {
  switch (f->kind) {
    case FormulaKind::AtomF:
      out += plain_atom(f->atom, ns);
      return;
    case FormulaKind::One:
      out += '1';
      return;
    case FormulaKind::Top:
      out += "top";
      return;
    case FormulaKind::Tensor:
    case FormulaKind::With: {
      const char* op = f->kind == FormulaKind::Tensor ? " * " : " & ";
      out += '(';
      for (std::size_t i = 0; i < f->kids.size(); ++i) {
        if (i) out += op;
        render_rec(f->kids[i], ns, out);
      }
      out += ')';
      return;
    }
    case FormulaKind::Lolli:
      out += '(';
      render_rec(f->kids[0], ns, out);
      out += " -o ";
      render_rec(f->kids[1], ns, out);
      out += ')';
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      out += '(';
      out += f->kind == FormulaKind::Exists ? "exists" : "forall";
      for (Term v : f->vars) {
        out += ' ';
        out += ns.name(v);
      }
      out += ". ";
      render_rec(f->body, ns, out);
      out += ')';
      return;
    }
    case FormulaKind::Bang:
      out += '!';
      render_rec(f->body, ns, out);
      return;
  }
}

}  // namespace

std::string render_ill(const PFormula& f, const NameSpace& ns) {
  std::string out;
  render_rec(f, ns, out);
  return out;
}

// ---------------------------------------------------------------------------
// Reading

namespace {

struct Reader {
  const std::string& text;
  std::size_t pos = 0;

  explicit Reader(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool eat_word(const char* w) {
    skip_ws();
    std::size_t n = std::string_view(w).size();
    if (text.compare(pos, n, w) != 0) return false;
    std::size_t end = pos + n;
    if (end < text.size() &&
        (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
      return false;
    pos = end;
    return true;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("formula syntax error at offset " +
                             std::to_string(pos) + ": " + what);
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    if (start == pos) fail("expected a name");
    return text.substr(start, pos - start);
  }

  // A trailing _<digits> component marks a variable and carries its id.
  Term name_term(const std::string& name) {
    if (name == "ng") return make_const(Vocab::get().ndg);
    std::size_t us = name.rfind('_');
    if (us != std::string::npos && us + 1 < name.size()) {
      bool digits = true;
      for (std::size_t i = us + 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      if (digits)
        return make_var(
            static_cast<std::uint32_t>(std::stoul(name.substr(us + 1))));
    }
    return make_const(intern(name));
  }

  Term term() {
    skip_ws();
    if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      std::size_t start = pos;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos])))
        ++pos;
      return make_nat(
          static_cast<std::uint32_t>(std::stoul(text.substr(start, pos - start))));
    }
    std::string name = ident();
    if (name == "s" && eat('(')) {
      Term inner = term();
      if (inner.kind != TermKind::Var) fail("successor over a non-variable");
      if (!eat(')')) fail("expected )");
      return make_succ(inner);
    }
    return name_term(name);
  }

  Atom atom(const std::string& pred) {
    Atom a;
    a.pred = intern(pred);
    if (!eat('(')) fail("expected ( after predicate");
    skip_ws();
    if (!eat(')')) {
      do {
        a.args.push_back(term());
      } while (eat(','));
      if (!eat(')')) fail("expected )");
    }
    return a;
  }

  PFormula formula() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    if (eat('!')) return f_bang(formula());
    if (text[pos] == '(') {
      ++pos;
      PFormula f = composite();
      if (!eat(')')) fail("expected )");
      return f;
    }
    if (eat_word("top")) return f_top();
    if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (text[pos] != '1') fail("only 1 is a formula");
      ++pos;
      return f_one();
    }
    return f_atom(atom(ident()));
  }

  PFormula composite() {
    skip_ws();
    if (eat_word("exists")) return quant(true);
    if (eat_word("forall")) return quant(false);
    PFormula first = formula();
    skip_ws();
    if (pos < text.size() && text[pos] == '*') {
      std::vector<PFormula> kids{first};
      while (eat('*')) kids.push_back(formula());
      return f_tensor(std::move(kids));
    }
    if (pos < text.size() && text[pos] == '&') {
      std::vector<PFormula> kids{first};
      while (eat('&')) kids.push_back(formula());
      if (kids.size() < 2) fail("with needs branches");
      auto f = std::make_shared<Formula>();
      f->kind = FormulaKind::With;
      f->kids = std::move(kids);
      return f;
    }
    if (eat('-')) {
      if (!eat('o')) fail("expected -o");
      return f_lolli(std::move(first), composite());
    }
    return first;
  }

  PFormula quant(bool is_exists) {
    std::vector<Term> vars;
    while (true) {
      skip_ws();
      if (eat('.')) break;
      Term v = name_term(ident());
      if (v.kind != TermKind::Var) fail("quantifier over a non-variable");
      vars.push_back(v);
    }
    PFormula body = composite();
    return is_exists ? f_exists(std::move(vars), std::move(body))
                     : f_forall(std::move(vars), std::move(body));
  }
};

}  // namespace

PFormula read_ill(const std::string& text) {
  Reader r(text);
  PFormula f = r.formula();
  r.skip_ws();
  if (r.pos != text.size()) r.fail("trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Fragment membership

bool in_goal_fragment(const PFormula& f) {
  switch (f->kind) {
    case FormulaKind::AtomF:
    case FormulaKind::One:
      return true;
    case FormulaKind::Tensor:
      for (const PFormula& k : f->kids)
        if (!in_goal_fragment(k)) return false;
      return true;
    case FormulaKind::Exists:
      return in_goal_fragment(f->body);
    default:
      return false;
  }
}

namespace {

// One choice branch: forall x~.(G -o P), with the quantifier prefix and the
// guard both optional in degenerate shapes.
bool is_branch(const PFormula& f) {
  const PFormula& core = f->kind == FormulaKind::Forall ? f->body : f;
  if (core->kind != FormulaKind::Lolli) return false;
  return in_goal_fragment(core->kids[0]) && in_process_fragment(core->kids[1]);
}

}  // namespace

bool in_process_fragment(const PFormula& f) {
  switch (f->kind) {
    case FormulaKind::AtomF:
    case FormulaKind::One:
      return true;
    case FormulaKind::Bang:
      return f->body->kind == FormulaKind::AtomF;
    case FormulaKind::Tensor:
      for (const PFormula& k : f->kids)
        if (!in_process_fragment(k)) return false;
      return true;
    case FormulaKind::Exists:
      return in_process_fragment(f->body);
    case FormulaKind::With:
      for (const PFormula& k : f->kids)
        if (!is_branch(k)) return false;
      return true;
    case FormulaKind::Forall:
    case FormulaKind::Lolli:
      return is_branch(f);
    case FormulaKind::Top:
      return false;
  }
  return false;
}

}  // namespace permflow
