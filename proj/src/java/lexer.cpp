#include "crowdsmell/java/lexer.hpp"

#include <array>
#include <cctype>

#include "crowdsmell/error.hpp"

namespace crowdsmell::java {

namespace {

constexpr std::array<std::string_view, 50> kKeywords = {
    "abstract", "assert",     "boolean",   "break",     "byte",      "case",     "catch",
    "char",     "class",      "const",     "continue",  "default",   "do",       "double",
    "else",     "enum",       "extends",   "final",     "finally",   "float",    "for",
    "goto",     "if",         "implements", "import",   "instanceof", "int",     "interface",
    "long",     "native",     "new",       "package",   "private",   "protected", "public",
    "return",   "short",      "static",    "strictfp",  "super",     "switch",   "synchronized",
    "this",     "throw",      "throws",    "transient", "try",       "void",     "volatile",
    "while"};

// Longest first; '>' forms are handled separately.
constexpr std::array<std::string_view, 20> kMultiOps = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=",
    "<=",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

bool is_primitive_type(std::string_view word) {
  return word == "int" || word == "long" || word == "short" || word == "byte" || word == "char" ||
         word == "boolean" || word == "float" || word == "double";
}

LexResult lex(std::string_view src) {
  LexResult out;
  std::size_t i = 0;
  int line = 1;
  const std::size_t n = src.size();

  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    out.tokens.push_back(Token{kind, std::string(src.substr(begin, end - begin)), line, false});
    out.code_lines.insert(line);
  };
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
  };

  while (i < n) {
    unsigned char c = src[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '/') {
      while (i < n && src[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && src[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/')) {
        if (src[i] == '\n') ++line;
        ++i;
      }
      if (i + 1 >= n) fail("unterminated comment");
      i += 2;
      continue;
    }
    if (ident_start(c)) {
      std::size_t b = i;
      while (i < n && ident_part(static_cast<unsigned char>(src[i]))) ++i;
      std::string_view word = src.substr(b, i - b);
      // true/false/null are lexed as keywords; the parser treats them as literals.
      bool literal_word = word == "true" || word == "false" || word == "null";
      push(is_keyword(word) || literal_word ? TokenKind::Keyword : TokenKind::Identifier, b, i);
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t b = i;
      bool is_float = false;
      if (c == '0' && i + 1 < n && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
        i += 2;
        while (i < n && (std::isxdigit(static_cast<unsigned char>(src[i])) || src[i] == '_' || src[i] == '.')) {
          if (src[i] == '.') is_float = true;
          ++i;
        }
        if (i < n && (src[i] == 'p' || src[i] == 'P')) {
          is_float = true;
          ++i;
          if (i < n && (src[i] == '+' || src[i] == '-')) ++i;
          while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      } else if (c == '0' && i + 1 < n && (src[i + 1] == 'b' || src[i + 1] == 'B')) {
        i += 2;
        while (i < n && (src[i] == '0' || src[i] == '1' || src[i] == '_')) ++i;
      } else {
        while (i < n && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
        if (i < n && src[i] == '.' && !(i + 1 < n && src[i + 1] == '.')) {
          is_float = true;
          ++i;
          while (i < n && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
        }
        if (i < n && (src[i] == 'e' || src[i] == 'E')) {
          is_float = true;
          ++i;
          if (i < n && (src[i] == '+' || src[i] == '-')) ++i;
          while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      if (i < n && std::string_view("fFdD").find(src[i]) != std::string_view::npos) {
        is_float = true;
        ++i;
      } else if (i < n && (src[i] == 'l' || src[i] == 'L')) {
        ++i;
      }
      push(is_float ? TokenKind::FloatLiteral : TokenKind::IntLiteral, b, i);
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t b = i++;
      while (i < n && src[i] != c) {
        if (src[i] == '\\') ++i;
        if (i < n && src[i] == '\n') fail("unterminated literal");
        ++i;
      }
      if (i >= n) fail("unterminated literal");
      ++i;
      push(c == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral, b, i);
      continue;
    }
    if (c == '>') {
      push(TokenKind::Operator, i, i + 1);
      ++i;
      out.tokens.back().joined = i < n && (src[i] == '>' || src[i] == '=');
      continue;
    }
    bool matched = false;
    for (auto op : kMultiOps) {
      if (src.substr(i, op.size()) == op) {
        push(TokenKind::Operator, i, i + op.size());
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("(){}[];,.@=<!~?:+-*/&|^%").find(static_cast<char>(c)) != std::string_view::npos) {
      push(TokenKind::Operator, i, i + 1);
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < n && src[i + 1] == 'u') {
      fail("unicode escapes outside literals are not supported");
    }
    fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
  }
  out.tokens.push_back(Token{TokenKind::End, "", line, false});
  return out;
}

}  // namespace crowdsmell::java
