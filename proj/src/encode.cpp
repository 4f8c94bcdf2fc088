#include "permflow/encode.hpp"

#include <cassert>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace permflow {

namespace {

using ast::ClassDecl;
using ast::ContractEntry;
using ast::Member;
using ast::Perm;
using ast::PermAnno;
using ast::Program;
using ast::RefExpr;
using ast::Stmt;
using ast::StmtKind;
using ast::TypeRef;

std::string upper_name(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::toupper(c)));
  return out;
}

// Variable bindings carry the declared type so field selections and shared
// group parameters can be resolved against the right class.
struct VarBinding {
  Term term;
  TypeRef type;
};

struct Scope {
  std::map<std::string, VarBinding> vars;
  std::map<std::string, Term> groups;
  const ClassDecl* cls = nullptr;
  bool in_def = false;
};

class Encoder {
 public:
  explicit Encoder(const Program& p) : prog_(p) {
    for (const ClassDecl& c : p.classes) classes_[c.name] = &c;
    assg_sym_ = intern("assg");
  }

  LccProgram build() {
    build_assg_def();
    for (const ClassDecl& c : prog_.classes)
      for (const Member& m : c.members) build_member(c, m);

    Scope sc;
    sc.groups["default"] = make_const(vb_.dflt);
    out_.z_main = fresh("Z", prog_.main_line);
    PProc blk = encode_block(prog_.main_stmts, sc, {}, out_.z_main,
                             prog_.main_line);

    Term c = fresh("A"), l = fresh("L"), li = fresh("N");
    PProc sentinel = p_ask(
        {c, l, li}, {a_sync(out_.z_main), a_evt(vb_.end, c, l, li, out_.z_main)},
        p_tell({Atom{vb_.ok, {}}}));
    PProc main = p_local({out_.z_main}, p_par({blk, sentinel}));
    if (uses_default_)
      main = p_par({p_tell({a_dg(make_const(vb_.dflt), make_const(vb_.atm),
                                 make_const(vb_.nst))}),
                    main});
    out_.main = main;

    SeenDefs seen;
    out_.statement_depth = stmts_depth(prog_.main_stmts, {}, seen);

    out_.run_defs = out_.defs;
    desugar_defs(out_.run_defs, out_.ns);
    out_.run_main = desugar(out_.main, out_.ns);
    return std::move(out_);
  }

 private:
  // ----- small term/atom helpers -------------------------------------------

  Term fresh(std::string_view base, int line = -1) {
    return out_.ns.fresh(base, line);
  }

  Term perm_const(Perm p) const {
    switch (p) {
      case Perm::Unq: return make_const(vb_.unq);
      case Perm::Shr: return make_const(vb_.shr);
      case Perm::Imm: return make_const(vb_.imm);
      case Perm::None: return make_const(vb_.none);
    }
    throw std::logic_error("bad permission");
  }

  Atom a_ref(Term x, Term o, Term p, Term g) const {
    return Atom{vb_.ref, {x, o, p, g}};
  }
  Atom a_ct(Term o, Term n) const { return Atom{vb_.ct, {o, n}}; }
  Atom a_sync(Term z) const { return Atom{vb_.sync, {z}}; }
  Atom a_evt(Symbol pred, Term c, Term l, Term li, Term z) const {
    return Atom{pred, {c, l, li, z}};
  }
  Atom a_dg(Term g, Term mode, Term z) const { return Atom{vb_.dg, {g, mode, z}}; }
  Atom a_env(Term g, Term mode, Term z) const {
    return Atom{vb_.env, {g, mode, z}};
  }
  Atom a_gpar(Term key, Term o, Term g) const {
    return Atom{vb_.gpar, {key, o, g}};
  }
  Atom a_field(Term u, Term o, Term key) const {
    return Atom{vb_.field, {u, o, key}};
  }
  Term ndg() const { return make_const(vb_.ndg); }
  Term nil() const { return make_const(vb_.nil); }
  Term nst() const { return make_const(vb_.nst); }
  Term conc() const { return make_const(vb_.conc); }
  Term atm() const { return make_const(vb_.atm); }

  const ClassDecl* cls_of(const TypeRef& tr) const {
    auto it = classes_.find(tr.class_name);
    assert(it != classes_.end());
    return it->second;
  }

  // Banged key naming the j-th group parameter slot of the target's class,
  // where j is the position the named group occupies in the declared type.
  Term gpar_key(const TypeRef& tr, const std::string& group) const {
    const ClassDecl* d = cls_of(tr);
    assert(!d->group_params.empty());
    std::size_t j = 0;
    if (!tr.group_args.empty()) {
      while (j < tr.group_args.size() && tr.group_args[j] != group) ++j;
      if (j == tr.group_args.size()) j = 0;
    }
    return make_const(d->name + "_" + d->group_params[j]);
  }

  Term group_term(const Scope& sc, const std::string& name) const {
    auto it = sc.groups.find(name);
    assert(it != sc.groups.end());
    return it->second;
  }

  // ----- shared process shapes ---------------------------------------------

  // act(c,l,n,z) -> run(c,l,n,z): every definition and block starts running
  // only once its wrapper has granted the group permissions it asked for.
  PProc actrun_gate(Term z) {
    Term c = fresh("A"), l = fresh("L"), li = fresh("N");
    return p_ask({c, l, li}, {a_evt(vb_.act, c, l, li, z)},
                 p_tell({a_evt(vb_.run, c, l, li, z)}));
  }

  // run(c,l,n,z) -> [sync(z) *] !end(c,l,n,z)
  PProc run_to_end(Term z, bool with_sync) {
    Term c = fresh("A"), l = fresh("L"), li = fresh("N");
    std::vector<Atom> lin;
    if (with_sync) lin.push_back(a_sync(z));
    return p_ask({c, l, li}, {a_evt(vb_.run, c, l, li, z)},
                 p_tell(std::move(lin), {a_evt(vb_.end, c, l, li, z)}));
  }

  // Statement wrapper: announces the statement (act), consumes one concurrent
  // group permission per group in scope, runs the payload, and republishes
  // the permissions once the payload's end token appears.
  PProc wrap(PProc inner, const std::vector<Term>& G, Term z, Term caller,
             Term label, int line) {
    Atom act = a_evt(vb_.act, caller, label, make_nat(line), z);
    if (G.empty()) return p_par({p_tell({act}), std::move(inner)});

    std::vector<Atom> dgs;
    for (Term g : G) dgs.push_back(a_dg(g, conc(), z));
    PProc gate = p_ask({}, dgs, p_skip());
    Term c = fresh("A"), l = fresh("L"), li = fresh("N");
    PProc listener =
        p_ask({c, l, li}, {a_evt(vb_.end, c, l, li, z)}, p_tell(dgs));
    // The announcement needs no sequencing of its own: only the payload is
    // held behind the group gate.
    return p_par({p_tell({act}),
                  p_seq(gate, p_par({std::move(inner), listener}))});
  }

  // Releases a variable's reference, decrementing the target's counter.
  PProc drop_proc(Term x) {
    std::vector<ProcBranch> br;
    br.push_back(
        ProcBranch{{}, {a_ref(x, nil(), make_const(vb_.none), ndg())}, p_skip()});
    for (Symbol p : {vb_.unq, vb_.shr, vb_.imm}) {
      Term o = fresh("O"), n = fresh("N"), g = fresh("G");
      br.push_back(ProcBranch{{o, n, g},
                              {a_ref(x, o, make_const(p), g),
                               a_ct(o, make_succ(n))},
                              p_tell({a_ct(o, n)})});
    }
    return p_choice(std::move(br));
  }

  // ----- reference and group resolution ------------------------------------

  const TypeRef& type_of(const Scope& sc, const std::string& name) const {
    auto it = sc.vars.find(name);
    assert(it != sc.vars.end());
    return it->second.type;
  }

  // Continuation-passing resolution of a possibly-selected reference: plain
  // variables resolve directly; field selections look the field variable up
  // in the store (re-telling the base reference they peeked at).
  PProc resolve_ref(const RefExpr& r, const Scope& sc,
                    const std::function<PProc(Term, const TypeRef&)>& k) {
    auto it = sc.vars.find(r.base);
    assert(it != sc.vars.end());
    if (!r.has_field()) return k(it->second.term, it->second.type);

    const ClassDecl* d = cls_of(it->second.type);
    const ast::FieldDecl* f = d->field(r.field);
    assert(f != nullptr);
    Term base = it->second.term;
    Term u = fresh("U", r.line), o = fresh("O"), p = fresh("P"), g = fresh("G");
    Term key = make_const(d->name + "_" + r.field);
    PProc body = p_seq(p_tell({a_ref(base, o, p, g)}), k(u, f->type));
    return p_choice({ProcBranch{
        {u, o, p, g}, {a_ref(base, o, p, g), a_field(u, o, key)}, body}});
  }

  PProc resolve_refs(const std::vector<RefExpr>& rs, std::size_t i,
                     const Scope& sc, std::vector<Term>& terms,
                     std::vector<TypeRef>& types,
                     const std::function<PProc()>& k) {
    if (i == rs.size()) return k();
    return resolve_ref(rs[i], sc, [&](Term t, const TypeRef& tr) {
      terms.push_back(t);
      types.push_back(tr);
      return resolve_refs(rs, i + 1, sc, terms, types, k);
    });
  }

  // Looks up the group arguments a target object was created with, so the
  // call can pass them into the definition.
  PProc with_groups(Term target, const ClassDecl* d,
                    const std::function<PProc(const std::vector<Term>&)>& k) {
    if (d->group_params.empty()) return k({});
    Term o = fresh("O"), p = fresh("P"), gv = fresh("G");
    std::vector<Term> bound{o, p, gv};
    std::vector<Atom> guard{a_ref(target, o, p, gv)};
    std::vector<Term> gs;
    for (const std::string& pg : d->group_params) {
      Term g = fresh(upper_name(pg));
      gs.push_back(g);
      bound.push_back(g);
      guard.push_back(a_gpar(make_const(d->name + "_" + pg), o, g));
    }
    PProc body = p_seq(p_tell({a_ref(target, o, p, gv)}), k(gs));
    return p_choice({ProcBranch{std::move(bound), std::move(guard), body}});
  }

  // ----- contract machinery -------------------------------------------------

  // Moves (or copies, for shared/immutable permissions) the caller-side
  // reference x into the definition-local x'.
  PProc consume_proc(Term x, Term xp, const PermAnno& pre, const TypeRef& tr) {
    switch (pre.perm) {
      case Perm::Unq:
      case Perm::None: {
        Term o = fresh("O");
        Term p = perm_const(pre.perm);
        return p_ask({o}, {a_ref(x, o, p, ndg())},
                     p_tell({a_ref(xp, o, p, ndg())}));
      }
      case Perm::Imm: {
        Term o = fresh("O"), n = fresh("N");
        return p_ask({o, n},
                     {a_ref(x, o, make_const(vb_.imm), ndg()), a_ct(o, n)},
                     p_tell({a_ref(x, o, make_const(vb_.imm), ndg()),
                             a_ct(o, make_succ(n)),
                             a_ref(xp, o, make_const(vb_.imm), ndg())}));
      }
      case Perm::Shr: {
        Term o = fresh("O"), g = fresh("G"), n = fresh("N");
        Term key = gpar_key(tr, pre.group);
        return p_ask({o, g, n},
                     {a_gpar(key, o, g), a_ref(x, o, make_const(vb_.shr), g),
                      a_ct(o, n)},
                     p_tell({a_ref(x, o, make_const(vb_.shr), g),
                             a_ct(o, make_succ(n)),
                             a_ref(xp, o, make_const(vb_.shr), g)}));
      }
    }
    throw std::logic_error("bad permission");
  }

  // Hands the reference back from x' to x at the permission the contract
  // promises on return.
  PProc transfer_proc(Term x, Term xp, const PermAnno& post,
                      const TypeRef& tr) {
    switch (post.perm) {
      case Perm::Shr: {
        Term o = fresh("O"), g = fresh("G");
        Term key = gpar_key(tr, post.group);
        return p_ask({o, g},
                     {a_gpar(key, o, g), a_ref(xp, o, make_const(vb_.shr), g)},
                     p_tell({a_ref(x, o, make_const(vb_.shr), g)}));
      }
      case Perm::Unq: {
        Term o = fresh("O");
        return p_ask({o},
                     {a_ref(xp, o, make_const(vb_.unq), ndg()),
                      a_ct(o, make_nat(1))},
                     p_tell({a_ref(x, o, make_const(vb_.unq), ndg()),
                             a_ct(o, make_nat(1))}));
      }
      case Perm::Imm:
      case Perm::None: {
        Term o = fresh("O");
        Term p = perm_const(post.perm);
        return p_ask({o}, {a_ref(xp, o, p, ndg())},
                     p_tell({a_ref(x, o, p, ndg())}));
      }
    }
    throw std::logic_error("bad permission");
  }

  // Drops the copy the caller retained while a shared/immutable argument was
  // borrowed, decrementing the counter.
  PProc drop_external_proc(Term x, const PermAnno& pre, const TypeRef& tr) {
    if (pre.perm == Perm::Imm) {
      Term o = fresh("O"), n = fresh("N");
      return p_ask({o, n},
                   {a_ref(x, o, make_const(vb_.imm), ndg()),
                    a_ct(o, make_succ(n))},
                   p_tell({a_ct(o, n)}));
    }
    assert(pre.perm == Perm::Shr);
    Term o = fresh("O"), g = fresh("G"), n = fresh("N");
    Term key = gpar_key(tr, pre.group);
    return p_ask({o, g, n},
                 {a_gpar(key, o, g), a_ref(x, o, make_const(vb_.shr), g),
                  a_ct(o, make_succ(n))},
                 p_tell({a_ct(o, n)}));
  }

  // Post-return reconciliation of one parameter: re-establishes the caller's
  // reference at the post-condition permission.
  PProc r_env_proc(Term x, const PermAnno& pre, Term xp, const PermAnno& post,
                   const TypeRef& tr) {
    if (pre.perm == post.perm) {
      switch (pre.perm) {
        case Perm::Imm: {
          // Callee's copy disappears; caller kept the original.
          Term o = fresh("O"), n = fresh("N");
          return p_ask({o, n},
                       {a_ref(xp, o, make_const(vb_.imm), ndg()),
                        a_ct(o, make_succ(n))},
                       p_tell({a_ct(o, n)}));
        }
        case Perm::Shr: {
          Term o = fresh("O"), g = fresh("G"), n = fresh("N");
          Term key = gpar_key(tr, pre.group);
          return p_ask({o, g, n},
                       {a_gpar(key, o, g),
                        a_ref(xp, o, make_const(vb_.shr), g),
                        a_ct(o, make_succ(n))},
                       p_tell({a_ct(o, n)}));
        }
        case Perm::Unq:
        case Perm::None:
          return transfer_proc(x, xp, post, tr);
      }
      throw std::logic_error("bad permission");
    }
    // Transfers (the caller gave its reference away) come straight back at
    // the new permission; borrows must first drop the retained copy.
    if (pre.perm == Perm::Unq || pre.perm == Perm::None)
      return transfer_proc(x, xp, post, tr);
    return p_seq(drop_external_proc(x, pre, tr), transfer_proc(x, xp, post, tr));
  }

  // ----- statements ----------------------------------------------------------

  PProc encode_stmt(const Stmt& s, Scope& sc, const std::vector<Term>& G,
                    Term z) {
    switch (s.kind) {
      case StmtKind::Assign:
        return encode_assign(s, sc, G, z);
      case StmtKind::New:
        return encode_new(s, sc, G, z);
      case StmtKind::Call:
        return encode_call(s, sc, G, z);
      case StmtKind::Split:
        return encode_split(s, sc, G, z);
      case StmtKind::Block:
        return encode_block(s.body, sc, G, z, s.line);
      case StmtKind::Let:
        return encode_let(s, sc, G, z);
      case StmtKind::GroupDecl:
        throw std::logic_error("group declaration outside a block slot");
    }
    throw std::logic_error("bad statement");
  }

  PProc encode_let(const Stmt& s, const Scope& sc, const std::vector<Term>& G,
                   Term z) {
    Scope inner = sc;
    std::vector<Term> xs;
    std::vector<Atom> nil_refs;
    for (const ast::VarDecl& d : s.decls) {
      Term x = fresh(upper_name(d.name), s.line);
      xs.push_back(x);
      nil_refs.push_back(a_ref(x, nil(), make_const(vb_.none), ndg()));
      inner.vars[d.name] = VarBinding{x, d.type};
      if (!sc.in_def) out_.main_vars.emplace_back(d.name, x);
    }
    PProc body = encode_block(s.body, inner, G, z, s.line);
    if (sc.in_def) {
      // Once the let's body has ended, its variables go out of scope and
      // release whatever they still reference.
      Term c = fresh("A"), l = fresh("L"), li = fresh("N");
      std::vector<PProc> drops;
      for (Term x : xs) drops.push_back(drop_proc(x));
      PProc gc = p_ask({c, l, li}, {a_evt(vb_.end, c, l, li, z)},
                       p_par(std::move(drops)));
      body = p_par({std::move(body), std::move(gc)});
    }
    return p_local(std::move(xs),
                   p_seq(p_tell(std::move(nil_refs)), std::move(body)));
  }

  PProc encode_block(const std::vector<ast::PStmt>& stmts, Scope sc,
                     const std::vector<Term>& G, Term z, int line) {
    Term block_label = make_const(vb_.block);
    if (stmts.empty())
      return p_tell({a_sync(z)},
                    {a_evt(vb_.end, nst(), block_label, make_nat(line), z)});

    std::vector<Term> zs;
    std::vector<PProc> slots;
    std::vector<bool> has_end;
    for (const ast::PStmt& sp : stmts) {
      const Stmt& st = *sp;
      Term zi = fresh("Z_PAR", st.line);
      zs.push_back(zi);
      if (st.kind == StmtKind::GroupDecl) {
        std::vector<Atom> tells;
        for (const std::string& gname : st.groups) {
          Term g = make_const(gname);
          sc.groups[gname] = g;
          out_.group_consts.emplace_back(gname, g);
          tells.push_back(a_dg(g, atm(), nst()));
        }
        tells.push_back(a_sync(zi));
        slots.push_back(p_tell(std::move(tells)));
        has_end.push_back(false);
      } else {
        // Inner statements run under the block's own synchronization
        // variable; group permissions are checked once by the block wrapper.
        slots.push_back(encode_stmt(st, sc, {}, zi));
        has_end.push_back(true);
      }
    }

    std::vector<PProc> kids;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (i == 0)
        kids.push_back(slots[i]);
      else
        kids.push_back(p_ask({}, {a_sync(zs[i - 1])}, slots[i]));
    }
    kids.push_back(p_ask({}, {a_sync(zs.back())}, p_tell({a_sync(z)})));

    // End collector: the block has ended once it has started running and
    // every statement slot reports done.
    Term c0 = fresh("A"), l0 = fresh("L"), li0 = fresh("N");
    std::vector<Term> bound{c0, l0, li0};
    std::vector<Atom> guard{a_evt(vb_.run, c0, l0, li0, z)};
    for (std::size_t i = 0; i < zs.size(); ++i) {
      if (!has_end[i]) continue;
      Term c = fresh("A"), l = fresh("L"), li = fresh("N");
      bound.insert(bound.end(), {c, l, li});
      guard.push_back(a_evt(vb_.end, c, l, li, zs[i]));
    }
    kids.push_back(p_choice({ProcBranch{
        std::move(bound), std::move(guard),
        p_tell({}, {a_evt(vb_.end, c0, l0, li0, z)})}}));

    PProc body = p_seq(actrun_gate(z), p_local(zs, p_par(std::move(kids))));
    return wrap(std::move(body), G, z, nst(), block_label, line);
  }

  PProc encode_assign(const Stmt& s, Scope& sc, const std::vector<Term>& G,
                      Term z) {
    Term gt = s.assign_group ? group_term(sc, *s.assign_group)
                             : make_const(vb_.dflt);
    Term label = make_const(vb_.assg);
    return resolve_ref(s.lhs, sc, [&](Term xt, const TypeRef&) {
      if (!s.rhs) {
        PProc inner =
            p_seq(drop_proc(xt),
                  p_seq(p_tell({a_ref(xt, nil(), make_const(vb_.none), ndg())}),
                        p_seq(actrun_gate(z), run_to_end(z, true))));
        return wrap(std::move(inner), G, z, xt, label, s.line);
      }
      return resolve_ref(*s.rhs, sc, [&](Term yt, const TypeRef&) {
        PProc inner = p_call(assg_sym_, {xt, yt, z, gt});
        return wrap(std::move(inner), G, z, xt, label, s.line);
      });
    });
  }

  PProc encode_new(const Stmt& s, Scope& sc, const std::vector<Term>& G,
                   Term z) {
    const ClassDecl* d = cls_of(s.new_type);
    Symbol callee = intern(d->name + "_" + d->name);
    Term label = make_const(callee);
    std::vector<Term> gts;
    for (const std::string& gname : s.new_type.group_args)
      gts.push_back(group_term(sc, gname));

    return resolve_ref(s.lhs, sc, [&](Term xt, const TypeRef&) {
      std::vector<Term> ats;
      std::vector<TypeRef> atys;
      return resolve_refs(s.args, 0, sc, ats, atys, [&]() {
        std::vector<Term> args{xt};
        args.insert(args.end(), ats.begin(), ats.end());
        args.push_back(z);
        args.insert(args.end(), gts.begin(), gts.end());
        PProc inner = p_call(callee, std::move(args));
        return wrap(std::move(inner), G, z, xt, label, s.line);
      });
    });
  }

  PProc encode_call(const Stmt& s, Scope& sc, const std::vector<Term>& G,
                    Term z) {
    return resolve_ref(s.target, sc, [&](Term tt, const TypeRef& ttype) {
      const ClassDecl* d = cls_of(ttype);
      Symbol callee = intern(d->name + "_" + s.method);
      Term label = make_const(callee);
      std::vector<Term> ats;
      std::vector<TypeRef> atys;
      return resolve_refs(s.args, 0, sc, ats, atys, [&]() {
        return with_groups(tt, d, [&](const std::vector<Term>& gs) {
          std::vector<Term> args{tt};
          args.insert(args.end(), ats.begin(), ats.end());
          args.push_back(z);
          args.insert(args.end(), gs.begin(), gs.end());
          PProc inner = p_call(callee, std::move(args));
          return wrap(std::move(inner), G, z, tt, label, s.line);
        });
      });
    });
  }

  PProc encode_split(const Stmt& s, Scope& sc, const std::vector<Term>& G,
                     Term z) {
    std::vector<Term> gprime;
    for (const std::string& gname : s.groups) {
      if (gname == "default") uses_default_ = true;
      gprime.push_back(group_term(sc, gname));
    }
    std::vector<Term> gwrap;
    for (Term g : G) {
      bool dropped = false;
      for (Term gp : gprime)
        if (gp == g) dropped = true;
      if (!dropped) gwrap.push_back(g);
    }

    std::vector<Term> zs;
    for (const ast::PStmt& sp : s.body) zs.push_back(fresh("Z_PAR", sp->line));
    Term zp = fresh("Z", s.line);

    // Capture each group's current mode so it can be restored on exit.
    std::vector<PProc> gain;
    for (Term g : gprime)
      gain.push_back(p_choice(
          {ProcBranch{{}, {a_dg(g, conc(), z)}, p_tell({a_env(g, conc(), z)})},
           ProcBranch{{},
                      {a_dg(g, atm(), nst())},
                      p_tell({a_env(g, atm(), nst())})}}));

    // On start, grant one concurrent permission per group to every branch.
    Term c = fresh("A"), l = fresh("L"), li = fresh("N");
    std::vector<Atom> add{a_evt(vb_.run, c, l, li, z)};
    for (Term zi : zs)
      for (Term g : gprime) add.push_back(a_dg(g, conc(), zi));
    PProc actadd = p_ask({c, l, li}, {a_evt(vb_.act, c, l, li, z)},
                         p_tell(std::move(add)));

    std::vector<PProc> kids;
    for (std::size_t i = 0; i < s.body.size(); ++i) {
      PProc slot = encode_stmt(*s.body[i], sc, gprime, zs[i]);
      if (i == 0)
        kids.push_back(std::move(slot));
      else
        kids.push_back(p_ask({}, {a_sync(zs[i - 1])}, std::move(slot)));
    }
    kids.push_back(p_ask({}, {a_sync(zs.back())}, p_tell({a_sync(zp)})));

    // Exit: reclaim every granted permission, then restore the saved modes.
    std::vector<Atom> reclaim;
    for (Term zi : zs)
      for (Term g : gprime) reclaim.push_back(a_dg(g, conc(), zi));
    PProc restore1 = p_ask({}, std::move(reclaim), p_tell({a_sync(z)}));
    std::vector<PProc> envs;
    for (Term g : gprime)
      envs.push_back(p_choice(
          {ProcBranch{{}, {a_env(g, conc(), z)}, p_tell({a_dg(g, conc(), z)})},
           ProcBranch{{},
                      {a_env(g, atm(), nst())},
                      p_tell({a_dg(g, atm(), nst())})}}));
    PProc finish = p_ask(
        {}, {a_sync(zp)},
        p_seq(restore1, p_seq(p_par(std::move(envs)), run_to_end(z, false))));
    kids.push_back(std::move(finish));

    std::vector<Term> locals = zs;
    locals.push_back(zp);
    PProc body = p_local(
        std::move(locals),
        p_seq(p_par(std::move(gain)), p_seq(actadd, p_par(std::move(kids)))));
    return wrap(std::move(body), gwrap, z, nst(), make_const("split"), s.line);
  }

  // ----- definitions ---------------------------------------------------------

  void build_assg_def() {
    Term x = fresh("X"), y = fresh("Y"), z = fresh("Z"), gt = fresh("G");

    std::vector<ProcBranch> br;
    // y is null: x becomes null too.
    br.push_back(ProcBranch{
        {},
        {a_ref(y, nil(), make_const(vb_.none), ndg())},
        p_tell({a_ref(y, nil(), make_const(vb_.none), ndg()),
                a_ref(x, nil(), make_const(vb_.none), ndg())})});
    {
      // y unique: both end up shared in the assignment's group.
      Term o = fresh("O");
      br.push_back(ProcBranch{
          {o},
          {a_ref(y, o, make_const(vb_.unq), ndg()), a_ct(o, make_nat(1))},
          p_tell({a_ref(y, o, make_const(vb_.shr), gt),
                  a_ref(x, o, make_const(vb_.shr), gt), a_ct(o, make_nat(2))})});
    }
    {
      // y already shared in this group: one more reference.
      Term o = fresh("O"), n = fresh("N");
      br.push_back(ProcBranch{
          {o, n},
          {a_ref(y, o, make_const(vb_.shr), gt), a_ct(o, n)},
          p_tell({a_ref(y, o, make_const(vb_.shr), gt),
                  a_ref(x, o, make_const(vb_.shr), gt),
                  a_ct(o, make_succ(n))})});
    }
    {
      // y immutable: copy freely.
      Term o = fresh("O"), n = fresh("N");
      br.push_back(ProcBranch{
          {o, n},
          {a_ref(y, o, make_const(vb_.imm), ndg()), a_ct(o, n)},
          p_tell({a_ref(y, o, make_const(vb_.imm), ndg()),
                  a_ref(x, o, make_const(vb_.imm), ndg()),
                  a_ct(o, make_succ(n))})});
    }
    PProc gain = p_choice(std::move(br));

    PProc body = p_seq(
        drop_proc(x),
        p_seq(std::move(gain), p_seq(actrun_gate(z), run_to_end(z, true))));
    out_.defs.add(Def{assg_sym_, {x, y, z, gt}, std::move(body)});
  }

  void build_member(const ClassDecl& cls, const Member& m) {
    Symbol name = intern(cls.name + "_" + m.name);

    Term x = fresh("THIS", m.line);
    std::vector<Term> ys;
    for (const ast::VarDecl& p : m.params)
      ys.push_back(fresh(upper_name(p.name), m.line));
    Term z = fresh("Z", m.line);
    std::vector<Term> gvs;
    for (const std::string& pg : cls.group_params)
      gvs.push_back(fresh(upper_name(pg), m.line));

    Term xp = fresh("INNER", m.line);
    std::vector<Term> yps;
    for (std::size_t i = 0; i < m.params.size(); ++i)
      yps.push_back(fresh("INNER", m.line));

    TypeRef this_type{cls.name, cls.group_params, m.line};
    Scope sc;
    sc.cls = &cls;
    sc.in_def = true;
    sc.groups["default"] = make_const(vb_.dflt);
    for (std::size_t i = 0; i < cls.group_params.size(); ++i)
      sc.groups[cls.group_params[i]] = gvs[i];
    sc.vars["this"] = VarBinding{xp, this_type};
    for (std::size_t i = 0; i < m.params.size(); ++i)
      sc.vars[m.params[i].name] = VarBinding{yps[i], m.params[i].type};

    const ContractEntry* te = m.entry("this");
    assert(te != nullptr);

    std::vector<PProc> consumes;
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      const ContractEntry* e = m.entry(m.params[i].name);
      assert(e != nullptr);
      consumes.push_back(
          consume_proc(ys[i], yps[i], e->pre, m.params[i].type));
    }
    Term o_new{};
    if (m.is_ctor) {
      // The constructed object: fresh, uniquely referenced by this'.
      o_new = fresh("O", m.line);
      consumes.push_back(
          p_ask({}, {a_ref(x, nil(), make_const(vb_.none), ndg())},
                p_tell({a_ref(xp, o_new, make_const(vb_.unq), ndg()),
                        a_ct(o_new, make_nat(1))})));
    } else {
      consumes.push_back(consume_proc(x, xp, te->pre, this_type));
    }

    Term zp = fresh("Z", m.line);
    PProc body_block = encode_block(m.body, sc, {}, zp, m.line);

    std::vector<PProc> renvs;
    if (m.is_ctor) {
      renvs.push_back(
          transfer_proc(x, xp, PermAnno{Perm::Unq, ""}, this_type));
    } else {
      renvs.push_back(r_env_proc(x, te->pre, xp, te->post, this_type));
    }
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      const ContractEntry* e = m.entry(m.params[i].name);
      renvs.push_back(
          r_env_proc(ys[i], e->pre, yps[i], e->post, m.params[i].type));
    }

    // The settle consumes this call's run token together with the body's
    // completion signal, publishes the end token, and only then releases the
    // permission restores.  End-before-restore keeps the event order sound in
    // both directions: a successor woken by a restored permission always
    // finds the end token already told, and the run token is gone before any
    // permission returns, so two calls serialized by a permission can never
    // have their run tokens in the store at once.
    Term rc = fresh("A"), rl = fresh("L"), rli = fresh("N");
    Term c = fresh("A"), l = fresh("L"), li = fresh("N");
    PProc settle =
        p_ask({c, l, li, rc, rl, rli},
              {a_sync(zp), a_evt(vb_.end, c, l, li, zp),
               a_evt(vb_.run, rc, rl, rli, z)},
              p_seq(p_tell({}, {a_evt(vb_.end, rc, rl, rli, z)}),
                    p_par(std::move(renvs))));
    PProc inner_body = p_local({zp}, p_par({body_block, settle}));

    // sync(z) releases the caller's next statement as soon as the arguments
    // are consumed; it runs alongside the gate rather than ahead of it.
    PProc tail = p_par({p_tell({a_sync(z)}),
                        p_seq(actrun_gate(z), std::move(inner_body))});

    PProc body;
    std::vector<Term> inner_vars = yps;
    inner_vars.push_back(xp);
    if (m.is_ctor) {
      // Group parameters and fields of the new object are installed before
      // the caller is released.
      std::vector<Atom> gpars;
      for (std::size_t i = 0; i < cls.group_params.size(); ++i)
        gpars.push_back(a_gpar(
            make_const(cls.name + "_" + cls.group_params[i]), o_new, gvs[i]));

      std::vector<Term> us;
      std::vector<Atom> field_banged, field_lin;
      for (const ast::FieldDecl& f : cls.fields) {
        Term u = fresh("U", f.line);
        us.push_back(u);
        field_banged.push_back(
            a_field(u, o_new, make_const(cls.name + "_" + f.name)));
        field_lin.push_back(a_ref(u, nil(), make_const(vb_.none), ndg()));
      }
      PProc fields_then_tail =
          us.empty() ? std::move(tail)
                     : p_local(us, p_seq(p_tell(std::move(field_lin),
                                                std::move(field_banged)),
                                         std::move(tail)));
      PProc after_gpars =
          p_seq(p_par(std::move(consumes)), std::move(fields_then_tail));
      PProc core = gpars.empty()
                       ? std::move(after_gpars)
                       : p_seq(p_tell({}, std::move(gpars)),
                               std::move(after_gpars));
      inner_vars.push_back(o_new);
      body = p_local(std::move(inner_vars), std::move(core));
    } else {
      body = p_local(std::move(inner_vars),
                     p_seq(p_par(std::move(consumes)), std::move(tail)));
    }

    std::vector<Term> params{x};
    params.insert(params.end(), ys.begin(), ys.end());
    params.push_back(z);
    params.insert(params.end(), gvs.begin(), gvs.end());
    out_.defs.add(Def{name, std::move(params), std::move(body)});
  }

  // ----- statement-level depth ----------------------------------------------

  using TypeEnv = std::map<std::string, TypeRef>;

  TypeRef env_type(const TypeEnv& env, const RefExpr& r) const {
    auto it = env.find(r.base);
    assert(it != env.end());
    if (!r.has_field()) return it->second;
    const ast::FieldDecl* f = cls_of(it->second)->field(r.field);
    assert(f != nullptr);
    return f->type;
  }

  // The decomposition weight of a statement counts the unfolding steps its
  // slot can force. A definition's body is charged only the first time the
  // definition is unfolded along the walk: later calls reuse the replicated
  // clause, so they add no new decomposition depth.
  using SeenDefs = std::set<std::string>;

  int member_depth(const ClassDecl& cls, const Member& m,
                   SeenDefs& seen) const {
    TypeEnv env;
    env["this"] = TypeRef{cls.name, cls.group_params, m.line};
    for (const ast::VarDecl& p : m.params) env[p.name] = p.type;
    return stmts_depth(m.body, env, seen);
  }

  int stmts_depth(const std::vector<ast::PStmt>& stmts, const TypeEnv& env,
                  SeenDefs& seen) const {
    int total = 0;
    for (const ast::PStmt& s : stmts) total += stmt_depth(*s, env, seen);
    return total;
  }

  int stmt_depth(const Stmt& s, const TypeEnv& env, SeenDefs& seen) const {
    switch (s.kind) {
      case StmtKind::GroupDecl:
        return 0;
      case StmtKind::Let: {
        TypeEnv inner = env;
        for (const ast::VarDecl& d : s.decls) inner[d.name] = d.type;
        return stmts_depth(s.body, inner, seen);
      }
      case StmtKind::Block:
        return stmts_depth(s.body, env, seen);
      case StmtKind::Assign:
        // A null assignment is expanded in place, so each occurrence pays
        // its own steps; reference assignment goes through one shared
        // definition.
        if (!s.rhs.has_value()) return 7;
        return seen.insert("assg").second ? 7 : 0;
      case StmtKind::Split:
        return 2 * static_cast<int>(s.groups.size()) + 4 +
               stmts_depth(s.body, env, seen);
      case StmtKind::New: {
        const ClassDecl* d = cls_of(s.new_type);
        if (!seen.insert(d->name + "::" + d->name).second) return 0;
        const Member* ct = d->ctor();
        return 8 + (ct ? member_depth(*d, *ct, seen) : 0);
      }
      case StmtKind::Call: {
        const ClassDecl* d = cls_of(env_type(env, s.target));
        if (!seen.insert(d->name + "::" + s.method).second) return 0;
        const Member* m = d->method(s.method);
        return 8 + (m ? member_depth(*d, *m, seen) : 0);
      }
    }
    return 0;
  }

  const Program& prog_;
  LccProgram out_;
  const Vocab& vb_ = Vocab::get();
  std::map<std::string, const ClassDecl*> classes_;
  Symbol assg_sym_{0};
  bool uses_default_ = false;
};

}  // namespace

LccProgram encode(const Program& program) { return Encoder(program).build(); }

}  // namespace permflow
