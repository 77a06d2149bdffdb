#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace crowdsmell::java {

enum class TokenKind { Identifier, Keyword, IntLiteral, FloatLiteral, CharLiteral, StringLiteral, Operator, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 0;
  // For '>' only: the next character follows with no whitespace, so
  // ">", ">" may be rejoined into ">>" by the expression parser.
  bool joined = false;

  [[nodiscard]] bool is(std::string_view s) const {
    return (kind == TokenKind::Operator || kind == TokenKind::Keyword) && text == s;
  }
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by an End token
  std::set<int> code_lines;   // lines holding at least one token
};

/// Tokenizes Java 8 source. Comments and whitespace are dropped; every
/// '>' is emitted on its own so nested generics close naturally.
/// Throws Error(ParseError) on unterminated literals or comments.
LexResult lex(std::string_view source);

bool is_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

}  // namespace crowdsmell::java
