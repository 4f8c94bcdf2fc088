#include "permflow/parse.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace permflow {
namespace {

using namespace ast;

enum class Tok : std::uint8_t {
  Ident,
  Assign,   // :=
  Arrow,    // =>
  Colon,    // :
  Comma,
  Dot,
  Semi,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LAngle,
  RAngle,
  End,      // end of input
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string file) : src_(src), file_(std::move(file)) {}

  Token next() {
    skip_ws();
    int line = line_, col = col_;
    if (pos_ >= src_.size()) return {Tok::End, "", line, col};
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), line, col};
    }
    if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      advance();
      advance();
      return {Tok::Assign, ":=", line, col};
    }
    if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      return {Tok::Arrow, "=>", line, col};
    }
    advance();
    switch (c) {
      case ':': return {Tok::Colon, ":", line, col};
      case ',': return {Tok::Comma, ",", line, col};
      case '.': return {Tok::Dot, ".", line, col};
      case ';': return {Tok::Semi, ";", line, col};
      case '{': return {Tok::LBrace, "{", line, col};
      case '}': return {Tok::RBrace, "}", line, col};
      case '(': return {Tok::LParen, "(", line, col};
      case ')': return {Tok::RParen, ")", line, col};
      case '<': return {Tok::LAngle, "<", line, col};
      case '>': return {Tok::RAngle, ">", line, col};
      default: break;
    }
    fail(line, col, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    std::ostringstream os;
    os << file_ << ":" << line << ":" << col << ": " << msg;
    throw ParseError(os.str());
  }

  const std::string& file() const { return file_; }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, std::string file) : lex_(src, std::move(file)) {
    cur_ = lex_.next();
    ahead_ = lex_.next();
  }

  Program parse() {
    Program p;
    p.file = lex_.file();
    while (!at(Tok::End)) {
      if (at_kw("class")) {
        p.classes.push_back(parse_class());
      } else if (at_kw("main")) {
        if (!p.main_stmts.empty() || p.main_line != 0)
          fail("duplicate main");
        parse_main(p);
      } else {
        fail("expected 'class' or 'main'");
      }
    }
    if (p.main_line == 0) fail("missing main");
    return p;
  }

 private:
  // --- token helpers -------------------------------------------------------
  bool at(Tok k) const { return cur_.kind == k; }
  bool at_kw(std::string_view kw) const { return cur_.kind == Tok::Ident && cur_.text == kw; }
  bool ahead(Tok k) const { return ahead_.kind == k; }

  Token take() {
    Token t = cur_;
    cur_ = ahead_;
    ahead_ = lex_.next();
    return t;
  }

  Token expect(Tok k, std::string_view what) {
    if (!at(k)) fail(std::string("expected ") + std::string(what));
    return take();
  }

  std::string expect_ident(std::string_view what) {
    if (!at(Tok::Ident)) fail(std::string("expected ") + std::string(what));
    return take().text;
  }

  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail(std::string("expected '") + std::string(kw) + "'");
    take();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    lex_.fail(cur_.line, cur_.col, msg + " (got '" + (at(Tok::End) ? "<eof>" : cur_.text) + "')");
  }

  void skip_semis() {
    while (at(Tok::Semi)) take();
  }

  // --- grammar -------------------------------------------------------------
  std::vector<std::string> parse_group_list(Tok open, Tok close, std::string_view what) {
    expect(open, what);
    std::vector<std::string> gs;
    gs.push_back(expect_ident("group name"));
    while (at(Tok::Comma)) {
      take();
      gs.push_back(expect_ident("group name"));
    }
    expect(close, what);
    return gs;
  }

  TypeRef parse_type() {
    TypeRef t;
    t.line = cur_.line;
    t.class_name = expect_ident("type name");
    if (at(Tok::LAngle)) t.group_args = parse_group_list(Tok::LAngle, Tok::RAngle, "'<'");
    return t;
  }

  RefExpr parse_ref() {
    RefExpr r;
    r.line = cur_.line;
    r.base = expect_ident("reference");
    if (at(Tok::Dot)) {
      take();
      r.field = expect_ident("field name");
    }
    return r;
  }

  // perm(target): unq(x) | imm(x) | none(x) | shr : g(x)
  void parse_contract_atom(std::string& target, PermAnno& anno, int& line) {
    line = cur_.line;
    std::string p = expect_ident("permission");
    if (p == "unq") {
      anno.perm = Perm::Unq;
    } else if (p == "imm") {
      anno.perm = Perm::Imm;
    } else if (p == "none") {
      anno.perm = Perm::None;
    } else if (p == "shr") {
      anno.perm = Perm::Shr;
      expect(Tok::Colon, "':' after shr");
      anno.group = expect_ident("group name");
    } else {
      fail("expected permission (unq, shr, imm, none)");
    }
    expect(Tok::LParen, "'('");
    target = expect_ident("contract target");
    expect(Tok::RParen, "')'");
  }

  std::vector<ContractEntry> parse_contract() {
    struct Half {
      std::string target;
      PermAnno anno;
      int line;
    };
    auto parse_side = [&] {
      std::vector<Half> side;
      Half h;
      parse_contract_atom(h.target, h.anno, h.line);
      side.push_back(h);
      while (at(Tok::Comma)) {
        take();
        parse_contract_atom(h.target, h.anno, h.line);
        side.push_back(h);
      }
      return side;
    };
    std::vector<Half> pre = parse_side();
    expect(Tok::Arrow, "'=>'");
    std::vector<Half> post = parse_side();

    std::vector<ContractEntry> out;
    for (const auto& h : pre) {
      ContractEntry e;
      e.target = h.target;
      e.pre = h.anno;
      e.line = h.line;
      bool found = false;
      for (const auto& q : post) {
        if (q.target == h.target) {
          e.post = q.anno;
          found = true;
          break;
        }
      }
      if (!found)
        lex_.fail(h.line, 1, "contract target '" + h.target + "' has no post-permission");
      for (const auto& other : out)
        if (other.target == h.target)
          lex_.fail(h.line, 1, "duplicate contract target '" + h.target + "'");
      out.push_back(std::move(e));
    }
    for (const auto& q : post) {
      bool found = false;
      for (const auto& e : out)
        if (e.target == q.target) found = true;
      if (!found)
        lex_.fail(q.line, 1, "contract target '" + q.target + "' has no pre-permission");
    }
    return out;
  }

  Member parse_member(const std::string& class_name) {
    Member m;
    m.line = cur_.line;
    m.name = expect_ident("member name");
    m.is_ctor = (m.name == class_name);
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      for (;;) {
        VarDecl d;
        d.type = parse_type();
        d.name = expect_ident("parameter name");
        m.params.push_back(std::move(d));
        if (!at(Tok::Comma)) break;
        take();
      }
    }
    expect(Tok::RParen, "')'");
    m.contract = parse_contract();
    if (at(Tok::LBrace)) {
      take();
      while (!at(Tok::RBrace)) m.body.push_back(parse_stmt());
      take();
    }
    return m;
  }

  ClassDecl parse_class() {
    ClassDecl c;
    c.line = cur_.line;
    expect_kw("class");
    c.name = expect_ident("class name");
    if (at(Tok::LAngle)) c.group_params = parse_group_list(Tok::LAngle, Tok::RAngle, "'<'");
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      skip_semis();
      if (at(Tok::RBrace)) break;
      if (at_kw("attr")) {
        take();
        for (;;) {
          FieldDecl f;
          f.line = cur_.line;
          f.type = parse_type();
          f.name = expect_ident("field name");
          c.fields.push_back(std::move(f));
          if (!at(Tok::Comma)) break;
          take();
        }
      } else {
        c.members.push_back(parse_member(c.name));
      }
      skip_semis();
    }
    take();  // }
    return c;
  }

  PStmt parse_stmt() {
    auto s = std::make_shared<Stmt>();
    s->line = cur_.line;
    if (at_kw("group")) {
      take();
      s->kind = StmtKind::GroupDecl;
      s->groups = parse_group_list(Tok::LAngle, Tok::RAngle, "'<'");
      return s;
    }
    if (at_kw("let")) {
      take();
      s->kind = StmtKind::Let;
      for (;;) {
        VarDecl d;
        d.type = parse_type();
        d.name = expect_ident("variable name");
        s->decls.push_back(std::move(d));
        if (!at(Tok::Comma)) break;
        take();
      }
      expect_kw("in");
      if (at(Tok::LBrace)) {
        take();
        while (!at(Tok::RBrace)) s->body.push_back(parse_stmt());
        take();
      } else {
        // Unbraced body: statements up to a closing 'end' (consumed) or an
        // enclosing '}' (left for the caller).
        while (!at_kw("end") && !at(Tok::RBrace) && !at(Tok::End))
          s->body.push_back(parse_stmt());
        if (at_kw("end")) take();
      }
      return s;
    }
    if (at_kw("split")) {
      take();
      s->kind = StmtKind::Split;
      if (at(Tok::LAngle))
        s->groups = parse_group_list(Tok::LAngle, Tok::RAngle, "'<'");
      else
        s->groups = parse_group_list(Tok::LParen, Tok::RParen, "'(' or '<'");
      expect(Tok::LBrace, "'{'");
      while (!at(Tok::RBrace)) s->body.push_back(parse_stmt());
      take();
      return s;
    }
    if (at(Tok::LBrace)) {
      take();
      s->kind = StmtKind::Block;
      while (!at(Tok::RBrace)) s->body.push_back(parse_stmt());
      take();
      return s;
    }

    // Starts with a reference: assignment, new, or method call.
    std::vector<std::pair<std::string, int>> chain;
    chain.emplace_back(expect_ident("statement"), s->line);
    while (at(Tok::Dot)) {
      take();
      chain.emplace_back(expect_ident("field or method name"), cur_.line);
    }

    if (at(Tok::LParen)) {
      // r.m(args): the last chain element is the method name.
      if (chain.size() < 2) fail("method call needs a target reference");
      if (chain.size() > 3) fail("call target may select at most one field");
      s->kind = StmtKind::Call;
      s->method = chain.back().first;
      s->target.base = chain[0].first;
      s->target.line = s->line;
      if (chain.size() == 3) s->target.field = chain[1].first;
      take();  // (
      if (!at(Tok::RParen)) {
        s->args.push_back(parse_ref());
        while (at(Tok::Comma)) {
          take();
          s->args.push_back(parse_ref());
        }
      }
      expect(Tok::RParen, "')'");
      skip_semis();
      return s;
    }

    if (chain.size() > 2) fail("assignment target may select at most one field");
    RefExpr lhs;
    lhs.base = chain[0].first;
    if (chain.size() == 2) lhs.field = chain[1].first;
    lhs.line = s->line;
    s->lhs = lhs;

    if (at(Tok::LAngle)) {
      take();
      s->assign_group = expect_ident("group name");
      expect(Tok::RAngle, "'>'");
    }
    expect(Tok::Assign, "':='");
    if (at_kw("new")) {
      take();
      s->kind = StmtKind::New;
      s->new_type = parse_type();
      expect(Tok::LParen, "'('");
      if (!at(Tok::RParen)) {
        s->args.push_back(parse_ref());
        while (at(Tok::Comma)) {
          take();
          s->args.push_back(parse_ref());
        }
      }
      expect(Tok::RParen, "')'");
      if (s->assign_group)
        lex_.fail(s->line, 1, "object creation does not take a group annotation");
    } else if (at_kw("null")) {
      take();
      s->kind = StmtKind::Assign;
      s->rhs = std::nullopt;
    } else {
      s->kind = StmtKind::Assign;
      s->rhs = parse_ref();
    }
    skip_semis();
    return s;
  }

  void parse_main(Program& p) {
    p.main_line = cur_.line;
    expect_kw("main");
    if (at(Tok::LParen)) {
      take();
      expect(Tok::RParen, "')'");
    }
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) p.main_stmts.push_back(parse_stmt());
    take();
  }

  Lexer lex_;
  Token cur_;
  Token ahead_;
};

}  // namespace

ast::Program parse_program(std::string_view source, std::string file) {
  return Parser(source, std::move(file)).parse();
}

ast::Program parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str(), path);
}

}  // namespace permflow
