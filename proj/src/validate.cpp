#include "permflow/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace permflow {

using namespace ast;

std::string to_string(const Diagnostic& d) {
  std::ostringstream os;
  os << d.file << ":" << d.line << ":" << d.col << ": " << d.message;
  return os.str();
}

namespace {

class Checker {
 public:
  explicit Checker(const Program& p) : prog_(p) {}

  std::vector<Diagnostic> run() {
    check_classes();
    check_main();
    return std::move(diags_);
  }

 private:
  void report(int line, const std::string& msg) {
    diags_.push_back({prog_.file, line, 1, msg});
  }

  // --- declarations --------------------------------------------------------
  void check_classes() {
    std::set<std::string> names;
    for (const auto& c : prog_.classes) {
      if (!names.insert(c.name).second)
        report(c.line, "duplicate class '" + c.name + "'");
      std::set<std::string> gps(c.group_params.begin(), c.group_params.end());
      if (gps.size() != c.group_params.size())
        report(c.line, "duplicate group parameter in class '" + c.name + "'");
    }
    for (const auto& c : prog_.classes) check_class(c);
  }

  void check_type(const TypeRef& t, const std::vector<std::string>& visible_groups,
                  bool require_full_args) {
    const ClassDecl* d = prog_.cls(t.class_name);
    if (!d) {
      report(t.line, "unknown class '" + t.class_name + "'");
      return;
    }
    if (!t.group_args.empty() && t.group_args.size() != d->group_params.size()) {
      report(t.line, "class '" + t.class_name + "' takes " +
                         std::to_string(d->group_params.size()) + " group argument(s), got " +
                         std::to_string(t.group_args.size()));
    }
    if (require_full_args && t.group_args.empty() && !d->group_params.empty())
      report(t.line, "object creation of '" + t.class_name + "' must instantiate its group(s)");
    for (const auto& g : t.group_args) {
      if (std::find(visible_groups.begin(), visible_groups.end(), g) == visible_groups.end())
        report(t.line, "unknown group '" + g + "'");
    }
  }

  void check_class(const ClassDecl& c) {
    std::set<std::string> fields;
    for (const auto& f : c.fields) {
      if (!fields.insert(f.name).second)
        report(f.line, "duplicate field '" + f.name + "' in class '" + c.name + "'");
      check_type(f.type, c.group_params, false);
    }
    std::set<std::string> members;
    int ctors = 0;
    for (const auto& m : c.members) {
      if (!members.insert(m.name).second)
        report(m.line, "duplicate member '" + m.name + "' in class '" + c.name + "'");
      if (m.is_ctor) ++ctors;
      check_member(c, m);
    }
    if (ctors > 1) report(c.line, "class '" + c.name + "' has more than one constructor");
  }

  void check_member(const ClassDecl& c, const Member& m) {
    std::set<std::string> pnames;
    for (const auto& p : m.params) {
      if (p.name == "this") report(m.line, "'this' cannot be a parameter name");
      if (!pnames.insert(p.name).second)
        report(m.line, "duplicate parameter '" + p.name + "' in '" + m.name + "'");
      check_type(p.type, c.group_params, false);
    }

    // Contract must mention exactly `this` and every parameter.
    std::set<std::string> targets;
    for (const auto& e : m.contract) {
      if (!targets.insert(e.target).second) continue;  // parser already rejects duplicates
      if (e.target != "this" && !pnames.count(e.target))
        report(e.line, "contract target '" + e.target + "' is not a parameter");
      check_perm(c, m, e.target, e.pre, e.line);
      check_perm(c, m, e.target, e.post, e.line);
    }
    if (!targets.count("this"))
      report(m.line, "contract of '" + m.name + "' must mention 'this'");
    for (const auto& p : m.params)
      if (!targets.count(p.name))
        report(m.line, "contract of '" + m.name + "' must mention parameter '" + p.name + "'");

    if (m.is_ctor) {
      const ContractEntry* e = m.entry("this");
      if (e && (e->pre.perm != Perm::None || e->post.perm != Perm::Unq))
        report(m.line, "constructor contract for 'this' must be none(this) => unq(this)");
    }

    // Body scope: this + parameters.
    Scope scope;
    scope["this"] = TypeRef{c.name, c.group_params, m.line};
    for (const auto& p : m.params) scope[p.name] = p.type;
    for (const auto& s : m.body) check_stmt(*s, scope, c.group_params, &c);
  }

  // A shared permission on `target` is representable only if the target's
  // class exposes the group: either the declared type instantiates it
  // explicitly, or the class has exactly one group parameter.
  void check_perm(const ClassDecl& c, const Member& m, const std::string& target,
                  const PermAnno& a, int line) {
    if (a.perm != Perm::Shr) return;
    if (std::find(c.group_params.begin(), c.group_params.end(), a.group) ==
        c.group_params.end()) {
      report(line, "group '" + a.group + "' is not a group parameter of class '" + c.name + "'");
      return;
    }
    TypeRef t;
    if (target == "this") {
      t = TypeRef{c.name, c.group_params, line};
    } else {
      bool found = false;
      for (const auto& p : m.params)
        if (p.name == target) {
          t = p.type;
          found = true;
        }
      if (!found) return;  // already reported
    }
    const ClassDecl* d = prog_.cls(t.class_name);
    if (!d) return;  // already reported
    if (d->group_params.empty()) {
      report(line, "class '" + t.class_name + "' has no group parameters, so '" + target +
                       "' cannot be shared");
      return;
    }
    if (!t.group_args.empty()) {
      if (std::find(t.group_args.begin(), t.group_args.end(), a.group) == t.group_args.end())
        report(line, "declared type of '" + target + "' does not carry group '" + a.group + "'");
    } else if (d->group_params.size() != 1) {
      report(line, "type of '" + target + "' omits group arguments and class '" + t.class_name +
                       "' has several group parameters; the shared group is ambiguous");
    }
  }

  // --- statements ----------------------------------------------------------
  using Scope = std::map<std::string, TypeRef>;

  const TypeRef* resolve(const RefExpr& r, const Scope& scope, const ClassDecl* cls) {
    auto it = scope.find(r.base);
    if (it == scope.end()) {
      if (r.base == "this")
        report(r.line, "'this' is only available inside class members");
      else
        report(r.line, "unknown variable '" + r.base + "'");
      return nullptr;
    }
    if (!r.has_field()) return &it->second;
    const ClassDecl* d = prog_.cls(it->second.class_name);
    if (!d) return nullptr;  // declaration already diagnosed
    const FieldDecl* f = d->field(r.field);
    if (!f) {
      report(r.line, "class '" + d->name + "' has no field '" + r.field + "'");
      return nullptr;
    }
    (void)cls;
    return &f->type;
  }

  void check_group_visible(const std::string& g, const std::vector<std::string>& groups,
                           int line) {
    if (g == "default") return;
    if (std::find(groups.begin(), groups.end(), g) == groups.end())
      report(line, "unknown group '" + g + "'");
  }

  void check_stmt(const Stmt& s, Scope scope, std::vector<std::string> groups,
                  const ClassDecl* cls) {
    switch (s.kind) {
      case StmtKind::GroupDecl:
        report(s.line, "group declarations are only allowed at the start of main");
        break;
      case StmtKind::Let: {
        for (const auto& d : s.decls) {
          check_type(d.type, groups, false);
          if (scope.count(d.name))
            report(s.line, "variable '" + d.name + "' shadows an existing binding");
          scope[d.name] = d.type;
        }
        for (const auto& b : s.body) check_stmt(*b, scope, groups, cls);
        break;
      }
      case StmtKind::Block:
        for (const auto& b : s.body) check_stmt(*b, scope, groups, cls);
        break;
      case StmtKind::Split: {
        for (const auto& g : s.groups) check_group_visible(g, groups, s.line);
        for (const auto& b : s.body) check_stmt(*b, scope, groups, cls);
        break;
      }
      case StmtKind::Assign: {
        const TypeRef* lt = resolve(s.lhs, scope, cls);
        if (s.assign_group) check_group_visible(*s.assign_group, groups, s.line);
        if (s.rhs) {
          const TypeRef* rt = resolve(*s.rhs, scope, cls);
          if (lt && rt && lt->class_name != rt->class_name)
            report(s.line, "cannot assign '" + rt->class_name + "' to '" + lt->class_name + "'");
        }
        break;
      }
      case StmtKind::New: {
        const TypeRef* lt = resolve(s.lhs, scope, cls);
        check_type(s.new_type, groups, true);
        const ClassDecl* d = prog_.cls(s.new_type.class_name);
        if (lt && lt->class_name != s.new_type.class_name)
          report(s.line, "cannot assign '" + s.new_type.class_name + "' to '" +
                             lt->class_name + "'");
        if (d) {
          const Member* ctor = d->ctor();
          if (!ctor) {
            report(s.line, "class '" + d->name + "' has no constructor");
          } else {
            check_args(ctor, s.args, scope, cls, s.line);
          }
        }
        break;
      }
      case StmtKind::Call: {
        const TypeRef* tt = resolve(s.target, scope, cls);
        if (!tt) break;
        const ClassDecl* d = prog_.cls(tt->class_name);
        if (!d) break;
        const Member* m = d->method(s.method);
        if (!m) {
          report(s.line, "class '" + d->name + "' has no method '" + s.method + "'");
          break;
        }
        check_args(m, s.args, scope, cls, s.line);
        break;
      }
    }
  }

  void check_args(const Member* m, const std::vector<RefExpr>& args, const Scope& scope,
                  const ClassDecl* cls, int line) {
    if (args.size() != m->params.size()) {
      report(line, "'" + m->name + "' takes " + std::to_string(m->params.size()) +
                       " argument(s), got " + std::to_string(args.size()));
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      const TypeRef* at = resolve(args[i], scope, cls);
      if (at && at->class_name != m->params[i].type.class_name)
        report(args[i].line, "argument " + std::to_string(i + 1) + " of '" + m->name +
                                 "' must be a '" + m->params[i].type.class_name + "', got '" +
                                 at->class_name + "'");
    }
  }

  // --- main ----------------------------------------------------------------
  void check_main() {
    std::vector<std::string> groups;
    bool past_groups = false;
    Scope scope;
    for (const auto& sp : prog_.main_stmts) {
      const Stmt& s = *sp;
      if (s.kind == StmtKind::GroupDecl) {
        if (past_groups) {
          report(s.line, "group declarations are only allowed at the start of main");
          continue;
        }
        for (const auto& g : s.groups) {
          if (std::find(groups.begin(), groups.end(), g) != groups.end())
            report(s.line, "duplicate group '" + g + "'");
          groups.push_back(g);
        }
        continue;
      }
      past_groups = true;
      check_stmt(s, scope, groups, nullptr);
    }
  }

  const Program& prog_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const ast::Program& program) {
  return Checker(program).run();
}

}  // namespace permflow
