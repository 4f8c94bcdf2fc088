#include "permflow/machine.hpp"

#include <cassert>
#include <random>
#include <stdexcept>

namespace permflow {

namespace {

// Adds `p` to the agent list, splitting parallel compositions and dropping
// empty tells. Every agent actually added counts as a created process.
void flatten(const PProc& p, Configuration& c) {
  switch (p->kind) {
    case ProcKind::Par:
      for (const PProc& k : p->kids) flatten(k, c);
      return;
    case ProcKind::Tell:
      if (p->tells.empty() && p->banged_tells.empty()) return;
      break;
    case ProcKind::Seq:
      throw std::logic_error("sequential composition reached the machine");
    default:
      break;
  }
  c.agents.push_back(p);
  ++c.created;
}

bool is_event_pred(Symbol pred) {
  const Vocab& vb = Vocab::get();
  return pred == vb.act || pred == vb.run || pred == vb.end;
}

}  // namespace

Configuration initial_configuration(const PProc& main) {
  Configuration c;
  flatten(main, c);
  return c;
}

std::vector<Transition> enabled_transitions(const Configuration& c,
                                            const DefTable& defs) {
  std::vector<Transition> out;
  for (std::uint32_t i = 0; i < c.agents.size(); ++i) {
    const PProc& a = c.agents[i];
    switch (a->kind) {
      case ProcKind::Tell:
      case ProcKind::Local:
        out.push_back(Transition{i, 0, 0});
        break;
      case ProcKind::Call:
        assert(defs.find(a->callee) != nullptr);
        out.push_back(Transition{i, 0, 0});
        break;
      case ProcKind::Choice:
        for (std::uint32_t b = 0; b < a->branches.size(); ++b) {
          Guard g{a->branches[b].bound, a->branches[b].guard};
          auto matches = match_guard(c.store, g);
          for (std::uint32_t m = 0; m < matches.size(); ++m)
            out.push_back(Transition{i, b, m});
        }
        break;
      default:
        throw std::logic_error("unexpected agent kind");
    }
  }
  return out;
}

void apply_transition(Configuration& c, const Transition& t,
                      const DefTable& defs, NameSpace& ns,
                      std::vector<Atom>* events) {
  assert(t.agent < c.agents.size());
  PProc a = c.agents[t.agent];
  c.agents.erase(c.agents.begin() + t.agent);
  switch (a->kind) {
    case ProcKind::Tell: {
      for (const Atom& atom : a->tells) {
        if (events && is_event_pred(atom.pred)) events->push_back(atom);
        c.store.add_linear(atom);
      }
      for (const Atom& atom : a->banged_tells) {
        if (events && is_event_pred(atom.pred)) events->push_back(atom);
        c.store.add_banged(atom);
      }
      return;
    }
    case ProcKind::Choice: {
      const ProcBranch& b = a->branches.at(t.branch);
      Guard g{b.bound, b.guard};
      auto matches = match_guard(c.store, g);
      const Match& m = matches.at(t.match);
      c.store = m.residual;
      flatten(subst_process(b.body, m.subst), c);
      return;
    }
    case ProcKind::Local: {
      Subst s;
      for (Term d : a->decls) {
        Term f = ns.fresh_like(d, ns);
        s.bind(d, f);
        c.hidden.push_back(f);
      }
      flatten(subst_process(a->left, s), c);
      return;
    }
    case ProcKind::Call: {
      const Def* d = defs.find(a->callee);
      if (!d) throw std::logic_error("call to unknown definition");
      if (d->params.size() != a->args.size())
        throw std::logic_error("arity mismatch in call");
      Subst s;
      for (std::size_t i = 0; i < d->params.size(); ++i)
        s.bind(d->params[i], a->args[i]);
      flatten(subst_process(d->body, s), c);
      return;
    }
    default:
      throw std::logic_error("unexpected agent kind");
  }
}

bool reached_ok(const Store& s) {
  const Vocab& vb = Vocab::get();
  for (const Atom& a : s.linear)
    if (a.pred == vb.ok) return true;
  for (const Atom& a : s.banged)
    if (a.pred == vb.ok) return true;
  return false;
}

namespace {

// First enabled transition of one agent, if any.
std::optional<Transition> first_enabled(const Configuration& c,
                                        std::uint32_t idx) {
  const PProc& a = c.agents[idx];
  switch (a->kind) {
    case ProcKind::Tell:
    case ProcKind::Local:
    case ProcKind::Call:
      return Transition{idx, 0, 0};
    case ProcKind::Choice:
      for (std::uint32_t b = 0; b < a->branches.size(); ++b) {
        Guard g{a->branches[b].bound, a->branches[b].guard};
        if (!match_guard(c.store, g).empty()) return Transition{idx, b, 0};
      }
      return std::nullopt;
    default:
      throw std::logic_error("unexpected agent kind");
  }
}

}  // namespace

RunResult run_scheduled(const PProc& main, const DefTable& defs, NameSpace& ns,
                        SchedulePolicy policy, std::uint64_t max_steps) {
  RunResult r;
  r.config = initial_configuration(main);
  std::mt19937_64 rng(policy.seed);
  std::uint32_t cursor = 0;

  while (!r.config.agents.empty()) {
    if (r.steps >= max_steps) {
      r.status = RunStatus::StepLimit;
      return r;
    }
    std::optional<Transition> chosen;
    if (policy.kind == SchedulePolicy::RoundRobin) {
      std::uint32_t n = static_cast<std::uint32_t>(r.config.agents.size());
      for (std::uint32_t k = 0; k < n && !chosen; ++k)
        chosen = first_enabled(r.config, (cursor + k) % n);
    } else {
      auto all = enabled_transitions(r.config, defs);
      if (!all.empty()) {
        // Uniform over agents with an enabled action, then over that agent's
        // transitions.
        std::vector<std::uint32_t> agents;
        for (const Transition& t : all)
          if (agents.empty() || agents.back() != t.agent)
            agents.push_back(t.agent);
        std::uint32_t a = agents[std::uniform_int_distribution<std::size_t>(
            0, agents.size() - 1)(rng)];
        std::vector<Transition> mine;
        for (const Transition& t : all)
          if (t.agent == a) mine.push_back(t);
        chosen = mine[std::uniform_int_distribution<std::size_t>(
            0, mine.size() - 1)(rng)];
      }
    }

    if (!chosen) break;  // quiescent with blocked agents
    apply_transition(r.config, *chosen, defs, ns, &r.events);
    r.decisions.push_back(*chosen);
    ++r.steps;
    cursor = chosen->agent;
    if (!r.config.agents.empty())
      cursor %= static_cast<std::uint32_t>(r.config.agents.size());
    else
      cursor = 0;
  }

  r.status = reached_ok(r.config.store) ? RunStatus::QuiescentOk
                                        : RunStatus::QuiescentStuck;
  return r;
}

RunResult run_replay(const PProc& main, const DefTable& defs, NameSpace& ns,
                     const std::vector<Transition>& decisions) {
  RunResult r;
  r.config = initial_configuration(main);
  for (const Transition& t : decisions) {
    auto all = enabled_transitions(r.config, defs);
    bool ok = false;
    for (const Transition& e : all)
      if (e == t) ok = true;
    if (!ok) break;
    apply_transition(r.config, t, defs, ns, &r.events);
    r.decisions.push_back(t);
    ++r.steps;
  }
  auto all = enabled_transitions(r.config, defs);
  if (!all.empty())
    r.status = RunStatus::StepLimit;  // stopped mid-run
  else
    r.status = reached_ok(r.config.store) ? RunStatus::QuiescentOk
                                          : RunStatus::QuiescentStuck;
  return r;
}

}  // namespace permflow
