#include "crowdsmell/java/parser.hpp"

#include <algorithm>
#include <utility>

#include "crowdsmell/error.hpp"
#include "crowdsmell/java/lexer.hpp"

namespace crowdsmell::java {

std::string TypeRef::erased() const {
  std::string out = base;
  for (int i = 0; i < dims; ++i) out += "[]";
  return out;
}

std::string MethodDecl::signature() const {
  std::string sig = name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) sig += ",";
    sig += params[i].type.erased();
  }
  return sig + ")";
}

int CompilationUnit::count_code_lines(int first, int last) const {
  auto lo = std::lower_bound(code_lines.begin(), code_lines.end(), first);
  auto hi = std::upper_bound(code_lines.begin(), code_lines.end(), last);
  return static_cast<int>(hi - lo);
}

namespace {

bool is_assign_op(std::string_view s) {
  return s == "=" || s == "+=" || s == "-=" || s == "*=" || s == "/=" || s == "%=" || s == "&=" ||
         s == "|=" || s == "^=" || s == "<<=";
}

int binary_precedence(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=") return 6;
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
  if (op == "<<" || op == ">>" || op == ">>>") return 8;
  if (op == "+" || op == "-") return 9;
  if (op == "*" || op == "/" || op == "%") return 10;
  return 0;
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  CompilationUnit parse_unit() {
    CompilationUnit unit;
    skip_annotations();
    if (accept("package")) {
      unit.package_name = parse_qualified_name();
      expect(";");
    }
    while (peek().is("import")) {
      next();
      std::string imp;
      if (accept("static")) imp = "static ";
      imp += parse_qualified_name();
      if (accept(".")) {
        expect("*");
        imp += ".*";
      }
      expect(";");
      unit.imports.push_back(std::move(imp));
    }
    while (peek().kind != TokenKind::End) {
      if (accept(";")) continue;
      int begin = 0;
      Modifiers mods = parse_modifiers(begin);
      unit.types.push_back(parse_type_decl(std::move(mods), begin));
    }
    return unit;
  }

 private:
  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(std::string_view s) {
    if (peek().is(s)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(peek().line) + ": " + what +
                                           " near '" + peek().text + "'");
  }
  const Token& expect(std::string_view s) {
    if (!peek().is(s)) fail("expected '" + std::string(s) + "'");
    return next();
  }
  bool at_ident(std::size_t k = 0) const { return peek(k).kind == TokenKind::Identifier; }
  std::string expect_ident() {
    if (!at_ident()) fail("expected identifier");
    return next().text;
  }

  std::string parse_qualified_name() {
    std::string name = expect_ident();
    while (peek().is(".") && at_ident(1)) {
      next();
      name += "." + next().text;
    }
    return name;
  }

  // Skips a balanced (...) group starting at '('.
  void skip_parens() {
    expect("(");
    int depth = 1;
    while (depth > 0) {
      if (peek().kind == TokenKind::End) fail("unbalanced parentheses");
      const Token& t = next();
      if (t.is("(")) ++depth;
      if (t.is(")")) --depth;
    }
  }

  // '<' ... '>' with nesting, used for type parameter declarations.
  void skip_angle_group() {
    expect("<");
    int depth = 1;
    while (depth > 0) {
      if (peek().kind == TokenKind::End) fail("unbalanced type parameters");
      const Token& t = next();
      if (t.is("<")) ++depth;
      if (t.is(">")) --depth;
    }
  }

  std::string parse_annotation() {
    expect("@");
    std::string name = parse_qualified_name();
    if (peek().is("(")) skip_parens();
    return name;
  }

  void skip_annotations() {
    while (peek().is("@") && !peek(1).is("interface")) parse_annotation();
  }

  Modifiers parse_modifiers(int& begin_line) {
    Modifiers m;
    begin_line = 0;
    for (;;) {
      const Token& t = peek();
      if (t.is("@") && !peek(1).is("interface")) {
        m.annotations.push_back(parse_annotation());
        continue;
      }
      bool matched = true;
      if (t.is("public")) m.is_public = true;
      else if (t.is("protected")) m.is_protected = true;
      else if (t.is("private")) m.is_private = true;
      else if (t.is("static")) m.is_static = true;
      else if (t.is("final")) m.is_final = true;
      else if (t.is("abstract")) m.is_abstract = true;
      else if (t.is("native")) m.is_native = true;
      else if (t.is("synchronized")) m.is_synchronized = true;
      else if (t.is("default") && !peek(1).is(":")) m.is_default = true;
      else if (t.is("transient") || t.is("volatile") || t.is("strictfp")) {}
      else matched = false;
      if (!matched) break;
      if (begin_line == 0) begin_line = t.line;
      next();
    }
    if (begin_line == 0) begin_line = peek().line;
    return m;
  }

  // ---- types ---------------------------------------------------------

  bool try_type_args(TypeRef& ref) {
    if (!peek().is("<")) return true;
    next();
    ref.text += "<";
    if (peek().is(">")) {  // diamond
      next();
      ref.text += ">";
      return true;
    }
    for (;;) {
      skip_annotations();
      if (accept("?")) {
        ref.text += "?";
        if (peek().is("extends") || peek().is("super")) {
          ref.text += " " + next().text + " ";
          TypeRef bound;
          if (!try_type_inner(bound, true)) return false;
          ref.text += bound.text;
          ref.names.insert(ref.names.end(), bound.names.begin(), bound.names.end());
        }
      } else {
        TypeRef arg;
        if (!try_type_inner(arg, true)) return false;
        ref.text += arg.text;
        ref.names.insert(ref.names.end(), arg.names.begin(), arg.names.end());
      }
      if (accept(",")) {
        ref.text += ",";
        continue;
      }
      if (accept(">")) {
        ref.text += ">";
        return true;
      }
      return false;
    }
  }

  bool try_type_inner(TypeRef& ref, bool allow_void) {
    skip_annotations();
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword && (is_primitive_type(t.text) || (allow_void && t.text == "void"))) {
      next();
      ref.text = t.text;
      ref.base = t.text;
      ref.primitive = true;
    } else if (t.kind == TokenKind::Identifier) {
      for (;;) {
        const Token& id = next();
        ref.text += id.text;
        ref.base = id.text;
        ref.names.push_back(id.text);
        if (!try_type_args(ref)) return false;
        if (peek().is(".") && at_ident(1)) {
          next();
          ref.text += ".";
          continue;
        }
        break;
      }
    } else {
      return false;
    }
    while (peek().is("[") && peek(1).is("]")) {
      next();
      next();
      ++ref.dims;
      ref.text += "[]";
    }
    return true;
  }

  // Speculative type parse; restores the position on failure.
  bool try_type(TypeRef& ref, bool allow_void = false) {
    std::size_t save = pos_;
    TypeRef tmp;
    if (try_type_inner(tmp, allow_void)) {
      ref = std::move(tmp);
      return true;
    }
    pos_ = save;
    return false;
  }

  TypeRef parse_type(bool allow_void = false) {
    TypeRef ref;
    if (!try_type(ref, allow_void)) fail("expected type");
    return ref;
  }

  std::vector<TypeRef> parse_type_list() {
    std::vector<TypeRef> list;
    list.push_back(parse_type());
    while (accept(",")) list.push_back(parse_type());
    return list;
  }

  // ---- declarations --------------------------------------------------

  std::unique_ptr<TypeDecl> parse_type_decl(Modifiers mods, int begin_line) {
    auto decl = std::make_unique<TypeDecl>();
    decl->mods = std::move(mods);
    decl->begin_line = begin_line;
    if (accept("class")) {
      decl->kind = TypeKind::Class;
    } else if (accept("interface")) {
      decl->kind = TypeKind::Interface;
    } else if (accept("enum")) {
      decl->kind = TypeKind::Enum;
    } else if (peek().is("@") && peek(1).is("interface")) {
      next();
      next();
      decl->kind = TypeKind::Annotation;
    } else {
      fail("expected type declaration");
    }
    decl->name = expect_ident();
    if (peek().is("<")) skip_angle_group();
    if (accept("extends")) {
      if (decl->kind == TypeKind::Interface) {
        decl->extends = parse_type_list();
      } else {
        decl->extends.push_back(parse_type());
      }
    }
    if (accept("implements")) decl->implements = parse_type_list();
    parse_class_body(*decl);
    return decl;
  }

  void parse_enum_constants(TypeDecl& decl) {
    while (!peek().is(";") && !peek().is("}")) {
      skip_annotations();
      FieldDecl f;
      f.line = peek().line;
      f.name = expect_ident();
      f.enum_constant = true;
      f.mods.is_public = f.mods.is_static = f.mods.is_final = true;
      f.type.text = f.type.base = decl.name;
      f.type.names.push_back(decl.name);
      if (peek().is("(")) {
        // Constructor arguments are not part of any method body.
        parse_arguments();
      }
      if (peek().is("{")) {
        TypeDecl body;
        parse_class_body(body);
      }
      decl.fields.push_back(std::move(f));
      if (!accept(",")) break;
    }
    accept(";");
  }

  void parse_class_body(TypeDecl& decl) {
    expect("{");
    if (decl.kind == TypeKind::Enum) parse_enum_constants(decl);
    const bool in_interface = decl.kind == TypeKind::Interface || decl.kind == TypeKind::Annotation;
    while (!peek().is("}")) {
      if (peek().kind == TokenKind::End) fail("unexpected end of file in class body");
      if (accept(";")) continue;
      if (peek().is("{") || (peek().is("static") && peek(1).is("{"))) {
        accept("static");
        decl.initializers.push_back(parse_block());
        continue;
      }
      int begin = 0;
      Modifiers mods = parse_modifiers(begin);
      if (peek().is("class") || peek().is("interface") || peek().is("enum") ||
          (peek().is("@") && peek(1).is("interface"))) {
        if (in_interface) mods.is_public = mods.is_static = true;
        decl.nested.push_back(parse_type_decl(std::move(mods), begin));
        continue;
      }
      if (peek().is("<")) skip_angle_group();
      if (at_ident() && peek().text == decl.name && peek(1).is("(")) {
        MethodDecl m;
        m.mods = std::move(mods);
        m.begin_line = begin;
        m.is_constructor = true;
        m.name = next().text;
        parse_method_rest(m);
        decl.methods.push_back(std::move(m));
        continue;
      }
      TypeRef type = parse_type(true);
      int name_line = peek().line;
      std::string name = expect_ident();
      if (peek().is("(")) {
        MethodDecl m;
        m.mods = std::move(mods);
        m.begin_line = begin;
        m.return_type = std::move(type);
        m.name = std::move(name);
        if (in_interface) {
          m.mods.is_public = true;
        }
        parse_method_rest(m);
        if (in_interface && !m.body && !m.mods.is_static) m.mods.is_abstract = true;
        decl.methods.push_back(std::move(m));
        continue;
      }
      if (in_interface) mods.is_public = mods.is_static = mods.is_final = true;
      for (;;) {
        FieldDecl f;
        f.mods = mods;
        f.type = type;
        f.name = std::move(name);
        f.line = name_line;
        while (peek().is("[") && peek(1).is("]")) {
          next();
          next();
          ++f.type.dims;
          f.type.text += "[]";
        }
        if (accept("=")) f.init = parse_var_init();
        decl.fields.push_back(std::move(f));
        if (!accept(",")) break;
        name_line = peek().line;
        name = expect_ident();
      }
      expect(";");
    }
    decl.end_line = next().line;  // '}'
  }

  void parse_method_rest(MethodDecl& m) {
    expect("(");
    while (!peek().is(")")) {
      Param p;
      for (;;) {
        if (accept("final")) continue;
        if (peek().is("@")) {
          parse_annotation();
          continue;
        }
        break;
      }
      p.type = parse_type();
      if (accept("...")) {
        p.varargs = true;
        ++p.type.dims;
        p.type.text += "...";
      }
      if (peek().is("this")) {
        next();  // receiver parameter
        if (!accept(",")) break;
        continue;
      }
      p.name = expect_ident();
      while (peek().is("[") && peek(1).is("]")) {
        next();
        next();
        ++p.type.dims;
        p.type.text += "[]";
      }
      m.params.push_back(std::move(p));
      if (!accept(",")) break;
    }
    expect(")");
    while (peek().is("[") && peek(1).is("]")) {
      next();
      next();
      ++m.return_type.dims;
      m.return_type.text += "[]";
    }
    if (accept("throws")) parse_type_list();
    if (peek().is("{")) {
      m.body = parse_block();
      m.end_line = toks_[pos_ - 1].line;
      return;
    }
    if (accept("default")) {
      while (!peek().is(";")) {
        if (peek().kind == TokenKind::End) fail("unterminated annotation default");
        next();
      }
    }
    m.end_line = expect(";").line;
  }

  // ---- statements ----------------------------------------------------

  StmtPtr make_stmt(StmtKind kind, int line) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->line = line;
    return s;
  }

  StmtPtr parse_block() {
    auto s = make_stmt(StmtKind::Block, peek().line);
    expect("{");
    while (!peek().is("}")) {
      if (peek().kind == TokenKind::End) fail("unexpected end of file in block");
      s->block.push_back(parse_block_statement());
    }
    next();
    return s;
  }

  bool starts_local_class() const {
    std::size_t k = 0;
    while (peek(k).is("final") || peek(k).is("abstract") || peek(k).is("static") || peek(k).is("strictfp")) ++k;
    return peek(k).is("class") || peek(k).is("interface") || peek(k).is("enum");
  }

  // Tries `Type name` at the current position; restores on failure.
  bool try_local_var_head(TypeRef& type) {
    std::size_t save = pos_;
    while (accept("final") || (peek().is("@") && (parse_annotation(), true))) {}
    if (try_type(type) && at_ident()) {
      const Token& after = peek(1);
      if (after.is("=") || after.is(";") || after.is(",") || after.is("[") || after.is(":")) return true;
    }
    pos_ = save;
    return false;
  }

  std::vector<LocalVar> parse_declarators(const TypeRef& type) {
    std::vector<LocalVar> vars;
    for (;;) {
      LocalVar v;
      v.type = type;
      v.line = peek().line;
      v.name = expect_ident();
      while (peek().is("[") && peek(1).is("]")) {
        next();
        next();
        ++v.type.dims;
        v.type.text += "[]";
      }
      if (accept("=")) v.init = parse_var_init();
      vars.push_back(std::move(v));
      if (!accept(",")) break;
    }
    return vars;
  }

  StmtPtr parse_block_statement() {
    if (starts_local_class()) {
      auto s = make_stmt(StmtKind::LocalClass, peek().line);
      int begin = 0;
      Modifiers mods = parse_modifiers(begin);
      s->local_class = parse_type_decl(std::move(mods), begin);
      return s;
    }
    TypeRef type;
    int line = peek().line;
    if ((at_ident() || peek().kind == TokenKind::Keyword || peek().is("@")) && try_local_var_head(type)) {
      auto s = make_stmt(StmtKind::LocalVars, line);
      s->vars = parse_declarators(type);
      expect(";");
      return s;
    }
    return parse_statement();
  }

  ExprPtr parse_par_expr() {
    expect("(");
    ExprPtr e = parse_expr();
    expect(")");
    return e;
  }

  StmtPtr parse_statement() {
    const Token& t = peek();
    int line = t.line;
    if (t.is("{")) return parse_block();
    if (t.is(";")) {
      next();
      return make_stmt(StmtKind::Empty, line);
    }
    if (t.is("if")) {
      next();
      auto s = make_stmt(StmtKind::If, line);
      s->expr = parse_par_expr();
      s->then_branch = parse_statement();
      if (accept("else")) s->else_branch = parse_statement();
      return s;
    }
    if (t.is("while")) {
      next();
      auto s = make_stmt(StmtKind::While, line);
      s->expr = parse_par_expr();
      s->body = parse_statement();
      return s;
    }
    if (t.is("do")) {
      next();
      auto s = make_stmt(StmtKind::Do, line);
      s->body = parse_statement();
      expect("while");
      s->expr = parse_par_expr();
      expect(";");
      return s;
    }
    if (t.is("for")) return parse_for();
    if (t.is("switch")) return parse_switch();
    if (t.is("try")) return parse_try();
    if (t.is("return")) {
      next();
      auto s = make_stmt(StmtKind::Return, line);
      if (!peek().is(";")) s->expr = parse_expr();
      expect(";");
      return s;
    }
    if (t.is("throw")) {
      next();
      auto s = make_stmt(StmtKind::Throw, line);
      s->expr = parse_expr();
      expect(";");
      return s;
    }
    if (t.is("break") || t.is("continue")) {
      auto s = make_stmt(t.is("break") ? StmtKind::Break : StmtKind::Continue, line);
      next();
      if (at_ident()) s->label = next().text;
      expect(";");
      return s;
    }
    if (t.is("synchronized")) {
      next();
      auto s = make_stmt(StmtKind::Synchronized, line);
      s->expr = parse_par_expr();
      s->body = parse_block();
      return s;
    }
    if (t.is("assert")) {
      next();
      auto s = make_stmt(StmtKind::Assert, line);
      s->expr = parse_expr();
      if (accept(":")) s->expr2 = parse_expr();
      expect(";");
      return s;
    }
    if (at_ident() && peek(1).is(":")) {
      auto s = make_stmt(StmtKind::Labeled, line);
      s->label = next().text;
      next();
      s->body = parse_statement();
      return s;
    }
    auto s = make_stmt(StmtKind::Expression, line);
    s->expr = parse_expr();
    expect(";");
    return s;
  }

  StmtPtr parse_for() {
    int line = next().line;
    expect("(");
    TypeRef type;
    if (try_local_var_head(type)) {
      if (peek(1).is(":")) {
        auto s = make_stmt(StmtKind::ForEach, line);
        LocalVar v;
        v.type = type;
        v.line = peek().line;
        v.name = expect_ident();
        s->vars.push_back(std::move(v));
        expect(":");
        s->expr2 = parse_expr();
        expect(")");
        s->body = parse_statement();
        return s;
      }
    }
    auto s = make_stmt(StmtKind::For, line);
    if (!type.empty()) {
      auto decl = make_stmt(StmtKind::LocalVars, line);
      decl->vars = parse_declarators(type);
      s->init.push_back(std::move(decl));
    } else if (!peek().is(";")) {
      do {
        auto e = make_stmt(StmtKind::Expression, peek().line);
        e->expr = parse_expr();
        s->init.push_back(std::move(e));
      } while (accept(","));
    }
    expect(";");
    if (!peek().is(";")) s->expr = parse_expr();
    expect(";");
    if (!peek().is(")")) {
      do {
        s->updates.push_back(parse_expr());
      } while (accept(","));
    }
    expect(")");
    s->body = parse_statement();
    return s;
  }

  StmtPtr parse_switch() {
    int line = next().line;
    auto s = make_stmt(StmtKind::Switch, line);
    s->expr = parse_par_expr();
    expect("{");
    while (!peek().is("}")) {
      SwitchCase c;
      if (accept("default")) {
        c.is_default = true;
        expect(":");
      } else {
        expect("case");
        c.labels.push_back(parse_expr());
        expect(":");
      }
      while (!peek().is("case") && !peek().is("default") && !peek().is("}")) {
        if (peek().kind == TokenKind::End) fail("unexpected end of file in switch");
        c.body.push_back(parse_block_statement());
      }
      s->cases.push_back(std::move(c));
    }
    next();
    return s;
  }

  StmtPtr parse_try() {
    int line = next().line;
    auto s = make_stmt(StmtKind::Try, line);
    if (accept("(")) {
      while (!peek().is(")")) {
        TypeRef type;
        while (accept("final")) {}
        type = parse_type();
        LocalVar v;
        v.type = std::move(type);
        v.line = peek().line;
        v.name = expect_ident();
        expect("=");
        v.init = parse_expr();
        s->vars.push_back(std::move(v));
        if (!accept(";")) break;
      }
      expect(")");
    }
    s->body = parse_block();
    while (peek().is("catch")) {
      next();
      expect("(");
      CatchClause c;
      while (accept("final") || (peek().is("@") && (parse_annotation(), true))) {}
      c.types.push_back(parse_type());
      while (accept("|")) c.types.push_back(parse_type());
      c.name = expect_ident();
      expect(")");
      c.block = parse_block();
      s->catches.push_back(std::move(c));
    }
    if (accept("finally")) s->finally_block = parse_block();
    if (s->catches.empty() && !s->finally_block && s->vars.empty()) fail("try without catch or finally");
    return s;
  }

  // ---- expressions ---------------------------------------------------

  ExprPtr make_expr(ExprKind kind, int line) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = line;
    return e;
  }

  ExprPtr parse_var_init() {
    if (peek().is("{")) return parse_array_init();
    return parse_expr();
  }

  ExprPtr parse_array_init() {
    auto e = make_expr(ExprKind::ArrayInit, peek().line);
    expect("{");
    while (!peek().is("}")) {
      e->args.push_back(parse_var_init());
      if (!accept(",")) break;
    }
    expect("}");
    return e;
  }

  std::vector<ExprPtr> parse_arguments() {
    std::vector<ExprPtr> args;
    expect("(");
    while (!peek().is(")")) {
      args.push_back(parse_expr());
      if (!accept(",")) break;
    }
    expect(")");
    return args;
  }

  ExprPtr parse_expr() { return parse_assignment(); }

  // Returns the assignment operator at the cursor and its token length, or "".
  std::pair<std::string, int> peek_assign_op() const {
    const Token& t = peek();
    if (t.kind == TokenKind::Operator && is_assign_op(t.text)) return {t.text, 1};
    if (t.is(">") && t.joined && peek(1).is(">")) {
      if (peek(1).joined && peek(2).is("=")) return {">>=", 3};
      if (peek(1).joined && peek(2).is(">") && peek(2).joined && peek(3).is("=")) return {">>>=", 4};
    }
    return {"", 0};
  }

  ExprPtr parse_assignment() {
    ExprPtr lhs = parse_conditional();
    auto [op, len] = peek_assign_op();
    if (len == 0) return lhs;
    int line = peek().line;
    for (int i = 0; i < len; ++i) next();
    auto e = make_expr(ExprKind::Assign, line);
    e->name = op;
    e->args.push_back(std::move(lhs));
    e->args.push_back(parse_assignment());
    return e;
  }

  bool is_lambda_start() const {
    if (at_ident() && peek(1).is("->")) return true;
    if (!peek().is("(")) return false;
    int depth = 0;
    for (std::size_t k = 0;; ++k) {
      const Token& t = peek(k);
      if (t.kind == TokenKind::End) return false;
      if (t.is("(")) ++depth;
      if (t.is(")") && --depth == 0) return peek(k + 1).is("->");
    }
  }

  ExprPtr parse_lambda() {
    auto e = make_expr(ExprKind::Lambda, peek().line);
    if (at_ident()) {
      e->lambda_params.push_back(next().text);
    } else {
      expect("(");
      int depth = 0;
      std::string last_ident;
      while (!(depth == 0 && peek().is(")"))) {
        const Token& t = next();
        if (t.is("(") || t.is("<")) ++depth;
        if (t.is(")") || t.is(">")) --depth;
        if (t.kind == TokenKind::Identifier) last_ident = t.text;
        if (depth == 0 && peek().is(",") ) {
          if (!last_ident.empty()) e->lambda_params.push_back(last_ident);
          last_ident.clear();
          next();
        }
      }
      if (!last_ident.empty()) e->lambda_params.push_back(last_ident);
      expect(")");
    }
    expect("->");
    if (peek().is("{")) {
      e->lambda_body = parse_block();
    } else {
      e->target = parse_expr();
    }
    return e;
  }

  ExprPtr parse_conditional() {
    if (is_lambda_start()) return parse_lambda();
    ExprPtr cond = parse_binary(1);
    if (!peek().is("?")) return cond;
    int line = next().line;
    auto e = make_expr(ExprKind::Conditional, line);
    e->args.push_back(std::move(cond));
    e->args.push_back(parse_expr());
    expect(":");
    e->args.push_back(parse_conditional());
    return e;
  }

  // Binary operator at the cursor, folding split '>' tokens; returns length in tokens.
  std::pair<std::string, int> peek_binary_op() const {
    const Token& t = peek();
    if (t.kind == TokenKind::Keyword && t.text == "instanceof") return {"instanceof", 1};
    if (t.kind != TokenKind::Operator) return {"", 0};
    if (t.text == ">") {
      if (!t.joined) return {">", 1};
      if (peek(1).is("=")) return {">=", 2};
      if (peek(1).is(">")) {
        if (peek(1).joined && peek(2).is("=")) return {"", 0};  // >>=
        if (peek(1).joined && peek(2).is(">")) {
          if (peek(2).joined && peek(3).is("=")) return {"", 0};  // >>>=
          return {">>>", 3};
        }
        return {">>", 2};
      }
      return {">", 1};
    }
    if (binary_precedence(t.text) > 0) return {t.text, 1};
    return {"", 0};
  }

  ExprPtr parse_binary(int min_prec) {
    ExprPtr lhs = parse_unary();
    for (;;) {
      auto [op, len] = peek_binary_op();
      int prec = len ? binary_precedence(op) : 0;
      if (prec == 0 || prec < min_prec) return lhs;
      int line = peek().line;
      for (int i = 0; i < len; ++i) next();
      if (op == "instanceof") {
        auto e = make_expr(ExprKind::InstanceOf, line);
        accept("final");
        e->type = parse_type();
        e->target = std::move(lhs);
        lhs = std::move(e);
        continue;
      }
      auto e = make_expr(ExprKind::Binary, line);
      e->name = op;
      e->args.push_back(std::move(lhs));
      e->args.push_back(parse_binary(prec + 1));
      lhs = std::move(e);
    }
  }

  static bool starts_cast_operand(const Token& t) {
    switch (t.kind) {
      case TokenKind::Identifier:
      case TokenKind::IntLiteral:
      case TokenKind::FloatLiteral:
      case TokenKind::CharLiteral:
      case TokenKind::StringLiteral:
        return true;
      case TokenKind::Keyword:
        return t.text == "this" || t.text == "super" || t.text == "new" || t.text == "true" ||
               t.text == "false" || t.text == "null" || is_primitive_type(t.text) || t.text == "void";
      case TokenKind::Operator:
        return t.text == "(" || t.text == "!" || t.text == "~";
      default:
        return false;
    }
  }

  ExprPtr try_cast() {
    std::size_t save = pos_;
    int line = peek().line;
    next();  // '('
    TypeRef type;
    bool primitive = peek().kind == TokenKind::Keyword && is_primitive_type(peek().text);
    if (try_type(type)) {
      while (peek().is("&")) {
        next();
        TypeRef extra;
        if (!try_type(extra)) break;
      }
      if (peek().is(")") && (primitive ? !type.empty() : starts_cast_operand(peek(1)))) {
        next();
        auto e = make_expr(ExprKind::Cast, line);
        e->type = std::move(type);
        e->target = parse_unary();
        return e;
      }
    }
    pos_ = save;
    return nullptr;
  }

  ExprPtr parse_unary() {
    const Token& t = peek();
    int line = t.line;
    if (t.is("+") || t.is("-") || t.is("++") || t.is("--") || t.is("!") || t.is("~")) {
      auto e = make_expr(ExprKind::Unary, line);
      e->name = next().text;
      e->target = parse_unary();
      return e;
    }
    if (t.is("(") && !is_lambda_start()) {
      if (ExprPtr cast = try_cast()) return cast;
    }
    return parse_postfix(parse_primary());
  }

  ExprPtr parse_creator(int line, ExprPtr outer) {
    skip_annotations();
    if (peek().is("<")) skip_angle_group();
    TypeRef type;
    // Base type without array dimensions; dims are parsed here.
    {
      const Token& t = peek();
      if (t.kind == TokenKind::Keyword && is_primitive_type(t.text)) {
        next();
        type.text = type.base = t.text;
        type.primitive = true;
      } else {
        for (;;) {
          skip_annotations();
          const Token& id = peek();
          if (id.kind != TokenKind::Identifier) fail("expected type after 'new'");
          next();
          type.text += id.text;
          type.base = id.text;
          type.names.push_back(id.text);
          if (!try_type_args(type)) fail("bad type arguments");
          if (peek().is(".") && at_ident(1)) {
            next();
            type.text += ".";
            continue;
          }
          break;
        }
      }
    }
    if (peek().is("[")) {
      auto e = make_expr(ExprKind::NewArray, line);
      while (peek().is("[")) {
        next();
        if (!peek().is("]")) e->args.push_back(parse_expr());
        expect("]");
        ++type.dims;
        type.text += "[]";
      }
      if (peek().is("{")) e->target = parse_array_init();
      e->type = std::move(type);
      return e;
    }
    auto e = make_expr(ExprKind::New, line);
    e->type = std::move(type);
    e->args = parse_arguments();
    e->target = std::move(outer);
    if (peek().is("{")) {
      e->anonymous = std::make_unique<TypeDecl>();
      e->anonymous->begin_line = peek().line;
      parse_class_body(*e->anonymous);
    }
    return e;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    int line = t.line;
    switch (t.kind) {
      case TokenKind::IntLiteral:
      case TokenKind::FloatLiteral:
      case TokenKind::CharLiteral:
      case TokenKind::StringLiteral: {
        auto e = make_expr(ExprKind::Literal, line);
        e->name = next().text;
        return e;
      }
      default:
        break;
    }
    if (t.is("true") || t.is("false") || t.is("null")) {
      auto e = make_expr(ExprKind::Literal, line);
      e->name = next().text;
      return e;
    }
    if (is_lambda_start()) return parse_lambda();
    if (t.is("(")) {
      next();
      ExprPtr inner = parse_expr();
      expect(")");
      return inner;
    }
    if (t.is("this") || t.is("super")) {
      bool is_this = t.is("this");
      next();
      if (peek().is("(")) {
        auto call = make_expr(ExprKind::MethodCall, line);
        call->name = is_this ? "this" : "super";
        call->args = parse_arguments();
        return call;
      }
      return make_expr(is_this ? ExprKind::This : ExprKind::Super, line);
    }
    if (t.is("new")) {
      next();
      return parse_creator(line, nullptr);
    }
    if (t.kind == TokenKind::Keyword && (is_primitive_type(t.text) || t.text == "void")) {
      TypeRef type = parse_type(true);
      if (accept("::")) {
        auto e = make_expr(ExprKind::MethodRef, line);
        e->type = std::move(type);
        e->name = accept("new") ? "new" : expect_ident();
        return e;
      }
      expect(".");
      expect("class");
      auto e = make_expr(ExprKind::ClassLiteral, line);
      e->type = std::move(type);
      return e;
    }
    if (t.is("<")) {
      skip_angle_group();
      auto call = make_expr(ExprKind::MethodCall, line);
      call->name = expect_ident();
      call->args = parse_arguments();
      return call;
    }
    if (at_ident()) {
      std::string name = next().text;
      if (peek().is("(")) {
        auto call = make_expr(ExprKind::MethodCall, line);
        call->name = std::move(name);
        call->args = parse_arguments();
        return call;
      }
      auto e = make_expr(ExprKind::Name, line);
      e->name = std::move(name);
      return e;
    }
    fail("expected expression");
  }

  static std::string expr_text(const Expr& e) {
    if (e.kind == ExprKind::Name) return e.name;
    if (e.kind == ExprKind::FieldAccess && e.target) return expr_text(*e.target) + "." + e.name;
    return e.name;
  }

  ExprPtr parse_postfix(ExprPtr e) {
    for (;;) {
      const Token& t = peek();
      int line = t.line;
      if (t.is(".")) {
        next();
        if (peek().is("<")) {
          skip_angle_group();
          auto call = make_expr(ExprKind::MethodCall, line);
          call->name = expect_ident();
          call->target = std::move(e);
          call->args = parse_arguments();
          e = std::move(call);
          continue;
        }
        if (accept("new")) {
          e = parse_creator(line, std::move(e));
          continue;
        }
        if (accept("this")) {
          auto self = make_expr(ExprKind::This, line);
          self->name = expr_text(*e);
          e = std::move(self);
          continue;
        }
        if (accept("super")) {
          auto sup = make_expr(ExprKind::Super, line);
          sup->name = expr_text(*e);
          e = std::move(sup);
          continue;
        }
        if (accept("class")) {
          auto lit = make_expr(ExprKind::ClassLiteral, line);
          lit->type.text = lit->type.base = expr_text(*e);
          lit->type.names.push_back(lit->type.base);
          e = std::move(lit);
          continue;
        }
        std::string name = expect_ident();
        if (peek().is("(")) {
          auto call = make_expr(ExprKind::MethodCall, line);
          call->name = std::move(name);
          call->target = std::move(e);
          call->args = parse_arguments();
          e = std::move(call);
        } else {
          auto fa = make_expr(ExprKind::FieldAccess, line);
          fa->name = std::move(name);
          fa->target = std::move(e);
          e = std::move(fa);
        }
        continue;
      }
      if (t.is("[")) {
        if (peek(1).is("]")) {
          // Array type in expression position: T[].class or T[]::new.
          TypeRef type;
          type.text = type.base = expr_text(*e);
          type.names.push_back(type.base);
          while (peek().is("[") && peek(1).is("]")) {
            next();
            next();
            ++type.dims;
          }
          if (accept("::")) {
            auto ref = make_expr(ExprKind::MethodRef, line);
            ref->type = std::move(type);
            ref->name = accept("new") ? "new" : expect_ident();
            e = std::move(ref);
            continue;
          }
          expect(".");
          expect("class");
          auto lit = make_expr(ExprKind::ClassLiteral, line);
          lit->type = std::move(type);
          e = std::move(lit);
          continue;
        }
        next();
        auto access = make_expr(ExprKind::ArrayAccess, line);
        access->target = std::move(e);
        access->args.push_back(parse_expr());
        expect("]");
        e = std::move(access);
        continue;
      }
      if (t.is("::")) {
        next();
        if (peek().is("<")) skip_angle_group();
        auto ref = make_expr(ExprKind::MethodRef, line);
        ref->name = accept("new") ? "new" : expect_ident();
        ref->target = std::move(e);
        e = std::move(ref);
        continue;
      }
      if (t.is("++") || t.is("--")) {
        auto post = make_expr(ExprKind::Postfix, line);
        post->name = next().text;
        post->target = std::move(e);
        e = std::move(post);
        continue;
      }
      return e;
    }
  }
};

std::vector<std::string> split_lines(std::string_view source) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < source.size()) lines.emplace_back(source.substr(start));
      break;
    }
    std::string_view line = source.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

CompilationUnit parse_compilation_unit(std::string_view source, std::string path) {
  LexResult lexed = lex(source);
  Parser parser(lexed.tokens);
  CompilationUnit unit = parser.parse_unit();
  unit.path = std::move(path);
  unit.source_lines = split_lines(source);
  unit.code_lines.assign(lexed.code_lines.begin(), lexed.code_lines.end());
  return unit;
}

}  // namespace crowdsmell::java
