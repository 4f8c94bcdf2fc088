#include "permflow/verify.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "permflow/encode.hpp"
#include "permflow/ill.hpp"
#include "permflow/validate.hpp"

namespace permflow {

namespace {

// ---------------------------------------------------------------------------
// Canonical configuration keys.
//
// The visited set must identify whole configurations — store plus pending
// agents — up to a single renaming of the hidden variables, or distinct
// states would be conflated (same store, different continuations) and
// symmetric states never merged. Each agent is serialized into one pseudo
// atom: the predicate encodes the agent's tree shape with bound variables
// numbered locally and free variables turned into argument slots, so the
// store canonicalizer computes one joint renaming across everything.

struct AgentShape {
  std::string shape;
  std::vector<Term> free;
};

class ShapeBuilder {
 public:
  AgentShape build(const PProc& p) {
    proc(p);
    return AgentShape{std::move(shape_), std::move(free_)};
  }

 private:
  std::string shape_;
  std::vector<Term> free_;
  std::map<std::uint32_t, int> local_;
  int next_local_ = 0;

  void var(std::uint32_t id) {
    if (auto it = local_.find(id); it != local_.end()) {
      shape_ += "%b" + std::to_string(it->second);
      return;
    }
    for (std::size_t i = 0; i < free_.size(); ++i) {
      if (free_[i].id == id) {
        shape_ += "%f" + std::to_string(i);
        return;
      }
    }
    shape_ += "%f" + std::to_string(free_.size());
    free_.push_back(make_var(id));
  }

  void term(Term t) {
    switch (t.kind) {
      case TermKind::Const:
        shape_ += symbol_name(t.id);
        return;
      case TermKind::Nat:
        shape_ += '#';
        shape_ += std::to_string(t.id);
        return;
      case TermKind::Var:
        var(t.id);
        return;
      case TermKind::Succ:
        shape_ += "s(";
        var(t.id);
        shape_ += ')';
        return;
    }
  }

  void atom(const Atom& a) {
    shape_ += symbol_name(a.pred);
    shape_ += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) shape_ += ',';
      term(a.args[i]);
    }
    shape_ += ')';
  }

  // Binds vars locally for a subtree, restoring the previous bindings after.
  template <typename F>
  void scoped(const std::vector<Term>& bound, F&& f) {
    std::vector<std::pair<std::uint32_t, std::optional<int>>> saved;
    for (Term b : bound) {
      auto it = local_.find(b.id);
      saved.emplace_back(b.id, it == local_.end()
                                   ? std::nullopt
                                   : std::optional<int>(it->second));
      local_[b.id] = next_local_++;
    }
    f();
    for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
      if (it->second)
        local_[it->first] = *it->second;
      else
        local_.erase(it->first);
    }
  }

  void proc(const PProc& p) {
    switch (p->kind) {
      case ProcKind::Tell:
        shape_ += "T[";
        for (std::size_t i = 0; i < p->tells.size(); ++i) {
          if (i) shape_ += ',';
          atom(p->tells[i]);
        }
        shape_ += '|';
        for (std::size_t i = 0; i < p->banged_tells.size(); ++i) {
          if (i) shape_ += ',';
          atom(p->banged_tells[i]);
        }
        shape_ += ']';
        return;
      case ProcKind::Choice:
        shape_ += "C[";
        for (const ProcBranch& b : p->branches) {
          shape_ += '{';
          shape_ += std::to_string(b.bound.size());
          shape_ += '|';
          scoped(b.bound, [&] {
            for (std::size_t i = 0; i < b.guard.size(); ++i) {
              if (i) shape_ += ',';
              atom(b.guard[i]);
            }
            shape_ += ">>";
            proc(b.body);
          });
          shape_ += '}';
        }
        shape_ += ']';
        return;
      case ProcKind::Par:
        shape_ += "P[";
        for (const PProc& k : p->kids) proc(k);
        shape_ += ']';
        return;
      case ProcKind::Local:
        shape_ += "L[";
        shape_ += std::to_string(p->decls.size());
        shape_ += '|';
        scoped(p->decls, [&] { proc(p->left); });
        shape_ += ']';
        return;
      case ProcKind::Call:
        shape_ += "D[";
        shape_ += symbol_name(p->callee);
        shape_ += '(';
        for (std::size_t i = 0; i < p->args.size(); ++i) {
          if (i) shape_ += ',';
          term(p->args[i]);
        }
        shape_ += ")]";
        return;
      case ProcKind::Seq:
        shape_ += "S[";
        proc(p->left);
        shape_ += ';';
        proc(p->right);
        shape_ += ']';
        return;
    }
  }
};

void collect_vars(Term t, std::unordered_set<std::uint32_t>& out) {
  if (t.kind == TermKind::Var || t.kind == TermKind::Succ) out.insert(t.id);
}

// Agents are immutable trees shared across sibling states, so their pseudo
// atoms can be memoized by node identity. Entries pin the node, keeping the
// address valid for as long as it is used as a key.
struct ShapeCache {
  std::unordered_map<const Process*, std::pair<Symbol, std::vector<Term>>>
      map;
  std::vector<PProc> pins;

  const std::pair<Symbol, std::vector<Term>>& lookup(const PProc& a) {
    auto it = map.find(a.get());
    if (it != map.end()) return it->second;
    if (map.size() > 500'000) {
      map.clear();
      pins.clear();
    }
    AgentShape sh = ShapeBuilder{}.build(a);
    // The space in the predicate cannot occur in a source-derived symbol,
    // so pseudo atoms never collide with real ones.
    Symbol pred = intern("ag " + sh.shape);
    pins.push_back(a);
    return map.emplace(a.get(), std::pair{pred, std::move(sh.free)})
        .first->second;
  }
};

std::string config_key(const Configuration& c, const NameSpace& ns,
                       ShapeCache& cache) {
  Store ext = c.store;
  for (const PProc& a : c.agents) {
    const auto& [pred, free] = cache.lookup(a);
    ext.linear.push_back(Atom{pred, free});
  }
  ext.normalize();

  // Hidden variables that no longer occur anywhere are interchangeable and
  // semantically inert; dropping them both merges equivalent states and
  // keeps the canonicalizer's symmetry search small.
  std::unordered_set<std::uint32_t> occurring;
  for (const Atom& a : ext.linear)
    for (Term t : a.args) collect_vars(t, occurring);
  for (const Atom& a : ext.banged)
    for (Term t : a.args) collect_vars(t, occurring);
  std::vector<Term> hid;
  for (Term h : c.hidden)
    if (h.kind == TermKind::Var && occurring.count(h.id)) hid.push_back(h);

  return canonicalize(ext, hid, ns);
}

// ---------------------------------------------------------------------------
// Statement-site discovery: every announced statement tells one act atom
// whose third argument is the source line.  Block wrappers announce events
// too (label `block`) but are scaffolding, not statements, so they are
// skipped here.

void collect_act_lines(const PProc& p, std::set<int>& lines) {
  const Vocab& vb = Vocab::get();
  switch (p->kind) {
    case ProcKind::Tell:
      for (const Atom& a : p->tells)
        if (a.pred == vb.act && a.args.size() == 4 &&
            a.args[2].kind == TermKind::Nat &&
            !(a.args[1].kind == TermKind::Const && a.args[1].id == vb.block))
          lines.insert(static_cast<int>(a.args[2].id));
      return;
    case ProcKind::Choice:
      for (const ProcBranch& b : p->branches) collect_act_lines(b.body, lines);
      return;
    case ProcKind::Par:
      for (const PProc& k : p->kids) collect_act_lines(k, lines);
      return;
    case ProcKind::Local:
      collect_act_lines(p->left, lines);
      return;
    case ProcKind::Seq:
      collect_act_lines(p->left, lines);
      collect_act_lines(p->right, lines);
      return;
    case ProcKind::Call:
      return;
  }
}

std::set<int> statement_lines(const LccProgram& lcc) {
  std::set<int> lines;
  collect_act_lines(lcc.run_main, lines);
  for (const Def& d : lcc.run_defs.all()) collect_act_lines(d.body, lines);
  return lines;
}

}  // namespace

// ---------------------------------------------------------------------------
// Goal parsing.

Guard parse_goal(const std::string& text, NameSpace& ns) {
  Guard g;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  auto fail = [&](const std::string& what) -> void {
    throw std::invalid_argument("goal syntax error at offset " +
                                std::to_string(pos) + ": " + what);
  };
  auto ident = [&]() -> std::string {
    skip();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    if (start == pos) fail("expected a name");
    return text.substr(start, pos - start);
  };

  skip();
  if (pos >= text.size()) fail("empty goal");
  while (true) {
    std::string pred = ident();
    Atom a;
    a.pred = intern(pred);
    skip();
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      skip();
      if (pos < text.size() && text[pos] == ')') {
        ++pos;
      } else {
        while (true) {
          skip();
          if (pos < text.size() && text[pos] == '_') {
            ++pos;
            Term w = ns.fresh("GOAL");
            g.bound.push_back(w);
            a.args.push_back(w);
          } else if (pos < text.size() &&
                     std::isdigit(static_cast<unsigned char>(text[pos]))) {
            std::size_t start = pos;
            while (pos < text.size() &&
                   std::isdigit(static_cast<unsigned char>(text[pos])))
              ++pos;
            a.args.push_back(make_nat(static_cast<std::uint32_t>(
                std::stoul(text.substr(start, pos - start)))));
          } else {
            a.args.push_back(make_const(intern(ident())));
          }
          skip();
          if (pos < text.size() && text[pos] == ',') {
            ++pos;
            continue;
          }
          if (pos < text.size() && text[pos] == ')') {
            ++pos;
            break;
          }
          fail("expected , or ) in argument list");
        }
      }
    }
    g.atoms.push_back(std::move(a));
    skip();
    if (pos >= text.size()) break;
    if (text[pos] != ',') fail("expected , between atoms");
    ++pos;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Core exploration.

namespace {

// Applies every enabled tell and local instantiation, lowest agent first,
// until only choices and calls remain, recording the steps taken. Negative
// actions are deterministic and confluent — tells only ever add atoms and
// instantiation touches no store atom — so flushing them eagerly loses no
// reachable positive branch, and any goal matching a mid-flush store still
// matches the flushed one (matching needs only a sub-store).
void flush_negatives(Configuration& cfg, const DefTable& defs, NameSpace& ns,
                     std::vector<Transition>& rec) {
  bool again = true;
  while (again) {
    again = false;
    for (std::uint32_t i = 0; i < cfg.agents.size(); ++i) {
      ProcKind k = cfg.agents[i]->kind;
      if (k != ProcKind::Tell && k != ProcKind::Local) continue;
      Transition t{i, 0, 0};
      apply_transition(cfg, t, defs, ns, nullptr);
      rec.push_back(t);
      again = true;
      break;
    }
  }
}

}  // namespace

Exploration explore_reachable(const PProc& main, const DefTable& defs,
                              const NameSpace& ns0,
                              const std::vector<Guard>& goals, int phase_bound,
                              std::uint64_t state_budget) {
  // Exploration states are negative-closed configurations; one edge is a
  // single positive action (choice firing or call unfolding — one phase)
  // followed by the deterministic negative flush.
  struct Node {
    Configuration cfg;  // released once expanded
    std::uint64_t ns_size = 0;
    std::uint32_t parent = UINT32_MAX;
    std::vector<Transition> via;  // positive step plus its flush
    std::uint32_t phases = 0;
  };

  Exploration ex;
  ex.goals.resize(goals.size());

  std::vector<Node> nodes;
  std::unordered_map<std::string, std::uint32_t> visited;
  std::deque<std::uint32_t> frontier;

  auto witness_of = [&](std::uint32_t idx) {
    std::vector<std::uint32_t> chain;
    for (std::uint32_t i = idx; i != UINT32_MAX; i = nodes[i].parent)
      chain.push_back(i);
    std::vector<Transition> w;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      w.insert(w.end(), nodes[*it].via.begin(), nodes[*it].via.end());
    return w;
  };

  std::size_t unreached = goals.size();
  auto test_goals = [&](std::uint32_t idx) {
    for (std::size_t gi = 0; gi < goals.size(); ++gi) {
      if (ex.goals[gi].reached) continue;
      if (!match_guard(nodes[idx].cfg.store, goals[gi]).empty()) {
        ex.goals[gi].reached = true;
        ex.goals[gi].witness = witness_of(idx);
        --unreached;
      }
    }
  };

  ShapeCache cache;

  // One working namespace, re-aligned per branch: fresh ids minted while
  // expanding match exactly what a clean replay along this path would mint,
  // so recorded transitions replay verbatim. The padding entries stand for
  // other branches' variables and are never inspected — instantiation only
  // reads encoder-era template entries.
  NameSpace work = ns0;

  {
    Node root;
    root.cfg = initial_configuration(main);
    flush_negatives(root.cfg, defs, work, root.via);
    root.ns_size = work.size();
    std::string key = config_key(root.cfg, ns0, cache);
    nodes.push_back(std::move(root));
    visited.emplace(std::move(key), 0);
    frontier.push_back(0);
    ex.states_explored = 1;
    test_goals(0);
  }

  while (!frontier.empty() && unreached > 0) {
    std::uint32_t idx = frontier.front();
    frontier.pop_front();

    // Every edge out of a closed state is positive: one phase.
    std::uint32_t phases = nodes[idx].phases + 1;
    std::vector<Transition> ts = enabled_transitions(nodes[idx].cfg, defs);
    if (!ts.empty()) {
      ex.max_phases_seen =
          std::max(ex.max_phases_seen, static_cast<int>(phases));
      if (static_cast<int>(phases) > phase_bound) {
        ++ex.bound_prunes;
        ts.clear();
      }
    }
    for (const Transition& t : ts) {
      Node child;
      child.cfg = nodes[idx].cfg;
      work.pad_resize(nodes[idx].ns_size);
      child.via.push_back(t);
      apply_transition(child.cfg, t, defs, work, nullptr);
      flush_negatives(child.cfg, defs, work, child.via);
      child.ns_size = work.size();
      child.parent = idx;
      child.phases = phases;

      std::string key = config_key(child.cfg, ns0, cache);
      auto [it, inserted] = visited.emplace(
          std::move(key), static_cast<std::uint32_t>(nodes.size()));
      if (!inserted) continue;

      nodes.push_back(std::move(child));
      frontier.push_back(static_cast<std::uint32_t>(nodes.size() - 1));
      ++ex.states_explored;
      test_goals(static_cast<std::uint32_t>(nodes.size() - 1));
      if (unreached == 0) break;
      if (ex.states_explored >= state_budget) {
        ex.budget_hit = true;
        return ex;
      }
    }

    nodes[idx].cfg = Configuration{};  // only the path data stays
  }

  ex.exhausted = !ex.budget_hit;
  return ex;
}

// ---------------------------------------------------------------------------
// Queries.

namespace {

// Confirms a claimed witness end to end: the decisions must all apply and
// the resulting store must still match the goal.
void validate_witness(const LccProgram& lcc, const Guard& goal,
                      const std::vector<Transition>& w) {
  NameSpace ns = lcc.ns;
  RunResult r = run_replay(lcc.run_main, lcc.run_defs, ns, w);
  if (r.steps != w.size())
    throw std::logic_error("witness does not replay");
  if (match_guard(r.config.store, goal).empty())
    throw std::logic_error("witness replay misses the goal");
}

Verdict run_query(const LccProgram& lcc, const std::vector<Guard>& goals,
                  const VerifyOptions& opt, Exploration& ex_out) {
  Verdict v;
  v.statement_depth = lcc.statement_depth;
  v.comp_main = comp(lcc.main, lcc.defs);
  v.depth_bound = std::max(v.comp_main, v.statement_depth) + 1;

  ex_out = explore_reachable(lcc.run_main, lcc.run_defs, lcc.ns, goals,
                             v.depth_bound, opt.state_budget);
  v.states_explored = ex_out.states_explored;
  v.max_phases_seen = ex_out.max_phases_seen;
  return v;
}

Verdict single_goal_query(const LccProgram& lcc, const Guard& goal,
                          const VerifyOptions& opt) {
  Exploration ex;
  Verdict v = run_query(lcc, {goal}, opt, ex);
  if (ex.goals[0].reached) {
    v.answer = Answer::Provable;
    v.witness = ex.goals[0].witness;
    validate_witness(lcc, goal, *v.witness);
  } else {
    v.answer = ex.budget_hit ? Answer::Inconclusive : Answer::NotProvable;
  }
  return v;
}

Guard ok_goal() {
  Guard g;
  g.atoms.push_back(Atom{Vocab::get().ok, {}});
  return g;
}

Verdict verify_deadlock(const ast::Program& p, const VerifyOptions& opt) {
  LccProgram lcc = encode(p);
  std::set<int> lines = statement_lines(lcc);

  std::vector<Guard> goals{ok_goal()};
  std::vector<int> line_order(lines.begin(), lines.end());
  const Vocab& vb = Vocab::get();
  for (int line : line_order) {
    Guard g;
    Term c = lcc.ns.fresh("GOAL"), l = lcc.ns.fresh("GOAL"),
         z = lcc.ns.fresh("GOAL");
    g.bound = {c, l, z};
    g.atoms.push_back(
        Atom{vb.end, {c, l, make_nat(static_cast<std::uint32_t>(line)), z}});
    goals.push_back(std::move(g));
  }

  Exploration ex;
  Verdict v = run_query(lcc, goals, opt, ex);
  if (ex.goals[0].reached) {
    v.answer = Answer::Provable;
    v.witness = ex.goals[0].witness;
    validate_witness(lcc, goals[0], *v.witness);
  } else {
    v.answer = ex.budget_hit ? Answer::Inconclusive : Answer::NotProvable;
  }
  for (std::size_t i = 0; i < line_order.size(); ++i)
    v.line_ends.push_back(LineEnd{line_order[i], ex.goals[i + 1].reached});
  return v;
}

Verdict verify_concurrent(const ast::Program& p, int line_a, int line_b,
                          const VerifyOptions& opt) {
  LccProgram lcc = encode(p);
  std::set<int> lines = statement_lines(lcc);
  for (int line : {line_a, line_b})
    if (!lines.count(line))
      throw std::invalid_argument("line " + std::to_string(line) +
                                  " carries no announced statement");

  const Vocab& vb = Vocab::get();
  Guard g;
  for (int line : {line_a, line_b}) {
    Term c = lcc.ns.fresh("GOAL"), l = lcc.ns.fresh("GOAL"),
         z = lcc.ns.fresh("GOAL");
    g.bound.insert(g.bound.end(), {c, l, z});
    g.atoms.push_back(
        Atom{vb.run, {c, l, make_nat(static_cast<std::uint32_t>(line)), z}});
  }
  return single_goal_query(lcc, g, opt);
}

// Builds the method-completion harness: construct one receiver (plus one
// instance per parameter, wired with fresh data groups) and call the member.
ast::Program method_harness(const ast::Program& p,
                            const std::string& class_name,
                            const std::string& member_name) {
  const ast::ClassDecl* cls = p.cls(class_name);
  if (!cls) throw std::invalid_argument("unknown class " + class_name);
  const ast::Member* member = member_name == class_name
                                  ? cls->ctor()
                                  : cls->method(member_name);
  if (!member)
    throw std::invalid_argument("unknown member " + class_name +
                                "." + member_name);

  auto argless_ctor = [](const ast::ClassDecl& c) {
    const ast::Member* ct = c.ctor();
    return ct && ct->params.empty() ? ct : nullptr;
  };
  if (!argless_ctor(*cls))
    throw std::invalid_argument("class " + class_name +
                                " has no argumentless constructor to build "
                                "the harness instance");

  ast::Program h;
  h.classes = p.classes;
  h.file = "<harness>";
  h.main_line = 1;

  int next_group = 0;
  std::vector<std::string> group_names;
  auto fresh_group = [&] {
    std::string g = "hg" + std::to_string(++next_group);
    group_names.push_back(g);
    return g;
  };

  // Receiver groups: one fresh group per class group parameter.
  std::map<std::string, std::string> receiver_groups;
  for (const std::string& gp : cls->group_params)
    receiver_groups[gp] = fresh_group();

  int line = 2;
  auto let = std::make_shared<ast::Stmt>();
  let->kind = ast::StmtKind::Let;
  let->line = line++;

  auto make_new = [&](const std::string& var, const std::string& cname,
                      std::vector<std::string> gargs) {
    auto s = std::make_shared<ast::Stmt>();
    s->kind = ast::StmtKind::New;
    s->line = line++;
    s->lhs = ast::RefExpr{var, "", s->line};
    s->new_type = ast::TypeRef{cname, std::move(gargs), s->line};
    return s;
  };

  std::vector<std::string> receiver_args;
  for (const std::string& gp : cls->group_params)
    receiver_args.push_back(receiver_groups.at(gp));
  let->decls.push_back(ast::VarDecl{ast::TypeRef{class_name, {}, 0}, "self"});
  std::vector<ast::PStmt> body;
  body.push_back(make_new("self", class_name, receiver_args));

  if (!member->is_ctor) {
    auto call = std::make_shared<ast::Stmt>();
    call->kind = ast::StmtKind::Call;
    call->target = ast::RefExpr{"self", "", 0};
    call->method = member_name;

    int pi = 0;
    for (const ast::VarDecl& param : member->params) {
      std::string var = "arg" + std::to_string(++pi);
      const ast::ClassDecl* pc = p.cls(param.type.class_name);
      if (!pc)
        throw std::invalid_argument("parameter type " +
                                    param.type.class_name + " is unknown");
      if (!argless_ctor(*pc))
        throw std::invalid_argument(
            "parameter type " + param.type.class_name +
            " has no argumentless constructor to build the harness instance");

      // Group arguments written in the signature refer to the receiver
      // class's group parameters; unmentioned generic slots get fresh ones.
      std::vector<std::string> gargs;
      for (const std::string& ga : param.type.group_args) {
        auto it = receiver_groups.find(ga);
        gargs.push_back(it != receiver_groups.end() ? it->second
                                                    : fresh_group());
      }
      while (gargs.size() < pc->group_params.size())
        gargs.push_back(fresh_group());

      let->decls.push_back(
          ast::VarDecl{ast::TypeRef{param.type.class_name, {}, 0}, var});
      body.push_back(make_new(var, param.type.class_name, std::move(gargs)));
      call->args.push_back(ast::RefExpr{var, "", 0});
    }
    call->line = line++;
    body.push_back(std::move(call));
  }

  let->body = std::move(body);
  if (!group_names.empty()) {
    auto gd = std::make_shared<ast::Stmt>();
    gd->kind = ast::StmtKind::GroupDecl;
    gd->line = 1;
    gd->groups = group_names;
    h.main_stmts.push_back(std::move(gd));
  }
  h.main_stmts.push_back(std::move(let));
  return h;
}

Verdict verify_method(const ast::Program& p, const std::string& class_name,
                      const std::string& member_name,
                      const VerifyOptions& opt) {
  ast::Program h = method_harness(p, class_name, member_name);
  validate(h);
  LccProgram lcc = encode(h);

  Guard g;
  Term c = lcc.ns.fresh("GOAL"), l = lcc.ns.fresh("GOAL"),
       z = lcc.ns.fresh("GOAL");
  g.bound = {c, l, z};
  g.atoms.push_back(Atom{Vocab::get().end,
                         {c, make_const(intern(class_name + "_" + member_name)),
                          l, z}});
  return single_goal_query(lcc, g, opt);
}

}  // namespace

Verdict verify(const ast::Program& p, const Query& q,
               const VerifyOptions& opt) {
  switch (q.kind) {
    case Query::Reachable: {
      LccProgram lcc = encode(p);
      Guard goal = parse_goal(q.goal, lcc.ns);
      return single_goal_query(lcc, goal, opt);
    }
    case Query::DeadlockFree:
      return verify_deadlock(p, opt);
    case Query::Concurrent:
      return verify_concurrent(p, q.line_a, q.line_b, opt);
    case Query::MethodCompletes:
      return verify_method(p, q.class_name, q.member_name, opt);
  }
  throw std::logic_error("bad query kind");
}

Verdict prove_reachable(const ast::Program& p, const std::string& goal,
                        const VerifyOptions& opt) {
  Query q;
  q.kind = Query::Reachable;
  q.goal = goal;
  return verify(p, q, opt);
}

Verdict check_deadlock(const ast::Program& p, const VerifyOptions& opt) {
  Query q;
  q.kind = Query::DeadlockFree;
  return verify(p, q, opt);
}

Verdict check_concurrent(const ast::Program& p, int line_a, int line_b,
                         const VerifyOptions& opt) {
  Query q;
  q.kind = Query::Concurrent;
  q.line_a = line_a;
  q.line_b = line_b;
  return verify(p, q, opt);
}

Verdict check_method(const ast::Program& p, const std::string& class_name,
                     const std::string& member_name,
                     const VerifyOptions& opt) {
  Query q;
  q.kind = Query::MethodCompletes;
  q.class_name = class_name;
  q.member_name = member_name;
  return verify(p, q, opt);
}

}  // namespace permflow
