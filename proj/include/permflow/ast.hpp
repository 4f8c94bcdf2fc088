// Surface syntax of access-permission annotated programs: classes with
// data-group parameters, fields, constructors/methods carrying permission
// contracts, and statements (let, assignment, call, new, split, blocks).
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace permflow::ast {

struct TypeRef {
  std::string class_name;
  std::vector<std::string> group_args;  // may be empty even for generic classes
  int line = 0;
};

// x, this, x.a or this.a.
struct RefExpr {
  std::string base;
  std::string field;  // empty when no selection
  int line = 0;

  bool has_field() const { return !field.empty(); }
};

enum class Perm : std::uint8_t { Unq, Shr, Imm, None };

struct PermAnno {
  Perm perm = Perm::None;
  std::string group;  // only for shr
};

struct Stmt;
using PStmt = std::shared_ptr<Stmt>;

struct VarDecl {
  TypeRef type;
  std::string name;
};

enum class StmtKind : std::uint8_t {
  GroupDecl,
  Let,
  Block,
  Split,
  Assign,  // r<g> := rhs | r := rhs | r := null
  New,     // r := new c<g...>(args)
  Call,    // r.m(args)
};

struct Stmt {
  StmtKind kind{};
  int line = 0;

  std::vector<std::string> groups;   // GroupDecl, Split
  std::vector<VarDecl> decls;        // Let
  std::vector<PStmt> body;           // Let, Block, Split

  RefExpr lhs;                       // Assign, New
  std::optional<std::string> assign_group;  // Assign: <g> annotation
  std::optional<RefExpr> rhs;        // Assign: null when absent
  TypeRef new_type;                  // New
  RefExpr target;                    // Call
  std::string method;                // Call
  std::vector<RefExpr> args;         // New, Call
};

struct ContractEntry {
  std::string target;  // "this" or a parameter name
  PermAnno pre;
  PermAnno post;
  int line = 0;
};

struct Member {
  bool is_ctor = false;
  std::string name;
  std::vector<VarDecl> params;
  std::vector<ContractEntry> contract;  // this plus one entry per parameter
  std::vector<PStmt> body;
  int line = 0;

  const ContractEntry* entry(const std::string& target) const {
    for (const auto& e : contract)
      if (e.target == target) return &e;
    return nullptr;
  }
};

struct FieldDecl {
  TypeRef type;
  std::string name;
  int line = 0;
};

struct ClassDecl {
  std::string name;
  std::vector<std::string> group_params;
  std::vector<FieldDecl> fields;
  std::vector<Member> members;
  int line = 0;

  const FieldDecl* field(const std::string& n) const {
    for (const auto& f : fields)
      if (f.name == n) return &f;
    return nullptr;
  }
  const Member* ctor() const {
    for (const auto& m : members)
      if (m.is_ctor) return &m;
    return nullptr;
  }
  const Member* method(const std::string& n) const {
    for (const auto& m : members)
      if (!m.is_ctor && m.name == n) return &m;
    return nullptr;
  }
};

struct Program {
  std::vector<ClassDecl> classes;
  std::vector<PStmt> main_stmts;  // group declarations first, then statements
  int main_line = 0;
  std::string file;

  const ClassDecl* cls(const std::string& n) const {
    for (const auto& c : classes)
      if (c.name == n) return &c;
    return nullptr;
  }
};

}  // namespace permflow::ast
