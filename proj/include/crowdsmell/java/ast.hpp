#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace crowdsmell::java {

struct Expr;
struct Stmt;
struct TypeDecl;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

struct TypeRef {
  std::string text;                 // as written, whitespace removed
  std::string base;                 // last simple name without type arguments, e.g. "List"
  std::vector<std::string> names;   // every simple type name mentioned, including type arguments
  int dims = 0;
  bool primitive = false;

  [[nodiscard]] bool empty() const { return text.empty(); }
  /// Erased form used in signatures: base plus "[]" per dimension.
  [[nodiscard]] std::string erased() const;
};

struct Modifiers {
  bool is_public = false;
  bool is_protected = false;
  bool is_private = false;
  bool is_static = false;
  bool is_final = false;
  bool is_abstract = false;
  bool is_native = false;
  bool is_synchronized = false;
  bool is_default = false;  // interface default method
  std::vector<std::string> annotations;
};

enum class ExprKind {
  Literal,
  Name,
  This,
  Super,
  FieldAccess,
  MethodCall,
  New,
  NewArray,
  ArrayInit,
  ArrayAccess,
  Assign,
  Binary,
  Unary,
  Postfix,
  Conditional,
  Cast,
  InstanceOf,
  Lambda,
  MethodRef,
  ClassLiteral,
};

struct Expr {
  ExprKind kind = ExprKind::Literal;
  int line = 0;
  std::string name;  // identifier, member name, operator or literal text
  TypeRef type;      // New, NewArray, Cast, InstanceOf, ClassLiteral
  ExprPtr target;    // receiver / operand / array
  std::vector<ExprPtr> args;  // call arguments, binary operands, conditional parts, dims, elements
  std::vector<std::string> lambda_params;
  StmtPtr lambda_body;                   // block-bodied lambdas
  std::unique_ptr<TypeDecl> anonymous;   // anonymous class body of `new T() {...}`
};

struct LocalVar {
  TypeRef type;
  std::string name;
  ExprPtr init;
  int line = 0;
};

struct SwitchCase {
  bool is_default = false;
  std::vector<ExprPtr> labels;
  std::vector<StmtPtr> body;
};

struct CatchClause {
  std::vector<TypeRef> types;
  std::string name;
  StmtPtr block;
};

enum class StmtKind {
  Block,
  LocalVars,
  LocalClass,
  Expression,
  If,
  For,
  ForEach,
  While,
  Do,
  Switch,
  Try,
  Return,
  Throw,
  Break,
  Continue,
  Synchronized,
  Labeled,
  Assert,
  Empty,
};

struct Stmt {
  StmtKind kind = StmtKind::Empty;
  int line = 0;
  ExprPtr expr;                 // condition, selector, value, lock, expression
  ExprPtr expr2;                // assert message, for-each iterable
  std::vector<ExprPtr> updates; // for updates
  std::vector<StmtPtr> init;    // for init
  std::vector<LocalVar> vars;   // declarators, for-each variable, try resources
  StmtPtr then_branch;
  StmtPtr else_branch;
  StmtPtr body;                 // loop/labeled/synchronized body, try block
  std::vector<StmtPtr> block;
  std::vector<SwitchCase> cases;
  std::vector<CatchClause> catches;
  StmtPtr finally_block;
  std::unique_ptr<TypeDecl> local_class;
  std::string label;
};

struct Param {
  TypeRef type;
  std::string name;
  bool varargs = false;
};

struct FieldDecl {
  Modifiers mods;
  TypeRef type;
  std::string name;
  ExprPtr init;
  int line = 0;
  bool enum_constant = false;
};

struct MethodDecl {
  Modifiers mods;
  TypeRef return_type;  // empty for constructors
  std::string name;
  std::vector<Param> params;
  bool is_constructor = false;
  StmtPtr body;  // null for abstract/native/interface methods
  int begin_line = 0;
  int end_line = 0;

  /// name(Erased1,Erased2)
  [[nodiscard]] std::string signature() const;
};

enum class TypeKind { Class, Interface, Enum, Annotation };

struct TypeDecl {
  TypeKind kind = TypeKind::Class;
  std::string name;
  Modifiers mods;
  std::vector<TypeRef> extends;
  std::vector<TypeRef> implements;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  std::vector<std::unique_ptr<TypeDecl>> nested;
  std::vector<StmtPtr> initializers;
  int begin_line = 0;
  int end_line = 0;
};

struct CompilationUnit {
  std::string path;
  std::string package_name;
  std::vector<std::string> imports;
  std::vector<std::unique_ptr<TypeDecl>> types;
  std::vector<std::string> source_lines;
  std::vector<int> code_lines;  // sorted lines holding tokens

  /// Count of lines in [first, last] holding at least one token.
  [[nodiscard]] int count_code_lines(int first, int last) const;
};

}  // namespace crowdsmell::java
