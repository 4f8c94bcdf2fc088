#include "permflow/animate.hpp"

#include <algorithm>
#include <string>

#include "json.hpp"

namespace permflow {

namespace {

// Finds the run-time incarnation of an encoded main variable: locals are
// renamed when instantiated, but keep their base name and line tag.
std::optional<Term> find_runtime_var(const Store& s, const NameSpace& ns,
                                     Term encoded) {
  const Vocab& vb = Vocab::get();
  for (const Atom& a : s.linear) {
    if (a.pred != vb.ref || a.args.empty()) continue;
    Term v = a.args[0];
    if (v.kind != TermKind::Var) continue;
    if (ns.base(v) == ns.base(encoded) && ns.line(v) == ns.line(encoded))
      return v;
  }
  return std::nullopt;
}

std::optional<std::uint32_t> count_of(const Store& s, Term obj) {
  const Vocab& vb = Vocab::get();
  for (const Atom& a : s.linear)
    if (a.pred == vb.ct && a.args.size() == 2 && a.args[0] == obj &&
        a.args[1].kind == TermKind::Nat)
      return a.args[1].id;
  return std::nullopt;
}

}  // namespace

std::vector<std::string> report_stuck(const Configuration& c,
                                      const NameSpace& ns) {
  std::vector<std::string> out;
  for (const PProc& a : c.agents)
    if (a->kind == ProcKind::Choice) out.push_back(render_blocked(a, ns));
  return out;
}

TraceReport report_from_run(const RunResult& run, const LccProgram& prog) {
  TraceReport r;
  r.status = run.status;
  r.events = run.events;
  r.steps = run.steps;
  r.decisions = run.decisions;
  r.process_count = run.config.created;
  r.final_store = run.config.store;

  const Vocab& vb = Vocab::get();
  const NameSpace& ns = prog.ns;
  if (r.status != RunStatus::QuiescentOk)
    r.killed = report_stuck(run.config, ns);

  for (const auto& [name, encoded] : prog.main_vars) {
    Binding b;
    b.name = name;
    if (auto v = find_runtime_var(run.config.store, ns, encoded)) {
      for (const Atom& a : run.config.store.linear) {
        if (a.pred != vb.ref || a.args.size() != 4 || a.args[0] != *v) continue;
        b.bound = true;
        b.var = *v;
        b.obj = a.args[1];
        b.perm = a.args[2];
        b.group = a.args[3];
        if (!(b.obj == make_const(vb.nil))) b.count = count_of(run.config.store, b.obj);
        break;
      }
    }
    r.bindings.push_back(std::move(b));
  }

  // Every variable still holding a reference, in creation order.
  std::vector<const Atom*> refs;
  for (const Atom& a : run.config.store.linear)
    if (a.pred == vb.ref && a.args.size() == 4 &&
        a.args[0].kind == TermKind::Var)
      refs.push_back(&a);
  std::sort(refs.begin(), refs.end(), [](const Atom* x, const Atom* y) {
    return x->args[0].id < y->args[0].id;
  });
  for (const Atom* a : refs) {
    std::string line = ns.name(a->args[0]) + " -> " +
                       render_term(a->args[1], ns) + ". " +
                       render_term(a->args[2], ns) + ":" +
                       render_term(a->args[3], ns);
    r.variables.push_back(std::move(line));
  }
  return r;
}

TraceReport animate(LccProgram& prog, SchedulePolicy policy,
                    std::uint64_t max_steps) {
  RunResult run =
      run_scheduled(prog.run_main, prog.run_defs, prog.ns, policy, max_steps);
  return report_from_run(run, prog);
}

std::string render_trace_text(const TraceReport& r, const NameSpace& ns) {
  std::string out;
  for (const Atom& e : r.events) out += render_atom(e, ns) + "\n";

  if (r.status == RunStatus::QuiescentOk) {
    out += "\n";
    for (const Binding& b : r.bindings) {
      if (!b.bound) continue;
      out += "[" + render_atom(Atom{Vocab::get().ref,
                                    {b.var, b.obj, b.perm, b.group}},
                               ns);
      if (b.count)
        out += ", ct(" + render_term(b.obj, ns) + "," +
               std::to_string(*b.count) + ")";
      out += "]\n";
    }
    out += "ok()\n";
    out += std::to_string(r.process_count) + " processes Created\n";
    out += "\n[OK] Token ok found. End of the program reached.\n";
    return out;
  }

  for (const std::string& k : r.killed) out += "[Killed] " + k + "\n";
  out += std::to_string(r.process_count) + " processes Created\n";
  if (r.status == RunStatus::StepLimit) {
    out += "[Stopped] Step limit reached before quiescence.\n";
  } else {
    out += "[FAIL] Token ok not found. End of the program not reached.\n";
  }
  out += "\nVARIABLES\n";
  for (const std::string& v : r.variables) out += v + "\n";
  return out;
}

std::string render_trace_json(const TraceReport& r, const NameSpace& ns) {
  nlohmann::json j;
  j["schemaVersion"] = 1;
  j["status"] = r.status == RunStatus::QuiescentOk     ? "quiescentOk"
                : r.status == RunStatus::QuiescentStuck ? "quiescentStuck"
                                                        : "stepLimit";
  j["processCount"] = r.process_count;
  j["steps"] = r.steps;
  nlohmann::json events = nlohmann::json::array();
  std::uint64_t idx = 0;
  for (const Atom& e : r.events) {
    nlohmann::json je;
    je["step"] = idx++;
    je["text"] = render_atom(e, ns);
    je["kind"] = symbol_name(e.pred);
    events.push_back(std::move(je));
  }
  j["events"] = std::move(events);
  nlohmann::json bind = nlohmann::json::object();
  for (const Binding& b : r.bindings) {
    nlohmann::json jb;
    if (!b.bound) {
      jb["bound"] = false;
    } else {
      jb["bound"] = true;
      jb["object"] = render_term(b.obj, ns);
      jb["permission"] = render_term(b.perm, ns);
      jb["group"] = render_term(b.group, ns);
      if (b.count) jb["count"] = *b.count;
    }
    bind[b.name] = std::move(jb);
  }
  j["finalBindings"] = std::move(bind);
  j["killed"] = r.killed;
  j["variables"] = r.variables;
  return j.dump(2) + "\n";
}

}  // namespace permflow
