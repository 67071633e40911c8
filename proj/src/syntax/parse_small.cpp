#include "syntax/language.hpp"
#include "syntax/parser_base.hpp"

namespace trellis::detail {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Toy declaration language used to exercise list heuristics:
//   function_declaration := type identifier "(" (type ",")* ")" ";"
//   group_declaration    := "group" identifier "{" identifier ("|" identifier)* "}" ";"
std::vector<Token> lex_toy(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    std::string kind;
    bool trivia = false;
    bool error = false;
    if (is_space(text[i])) {
      while (j < text.size() && is_space(text[j])) ++j;
      kind = "whitespace";
      trivia = true;
    } else if (is_ident_start(text[i])) {
      while (j < text.size() && is_ident_char(text[j])) ++j;
      kind = text.substr(i, j - i) == "group" ? "group" : "word";
    } else if (std::string_view("(),;{}|").find(text[i]) != std::string_view::npos) {
      j = i + 1;
      kind = std::string(1, text[i]);
    } else {
      j = i + 1;
      kind = "ERROR";
      error = true;
    }
    tokens.push_back({kind, {i, j}, trivia, error, false, 0});
    i = j;
  }
  annotate_lines(text, tokens);
  return tokens;
}

class ToyParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  void program() {
    while (!at_end()) {
      if (at("group")) {
        group();
      } else if (at("word")) {
        function();
      } else {
        bump_as_error();
      }
    }
  }

 private:
  void word_as(const char* kind) {
    if (at("word")) bump_as(kind); else missing();
  }

  void function() {
    auto m = open();
    word_as("type");
    word_as("identifier");
    expect("(");
    while (at("word")) {
      bump_as("type");
      expect(",");
    }
    expect(")");
    expect(";");
    close(m, "function_declaration");
  }

  void group() {
    auto m = open();
    bump();
    word_as("identifier");
    expect("{");
    word_as("identifier");
    while (eat("|")) word_as("identifier");
    expect("}");
    expect(";");
    close(m, "group_declaration");
  }
};

std::vector<Token> lex_sexp(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    std::string kind;
    bool trivia = false;
    bool error = false;
    char c = text[i];
    if (is_space(c)) {
      while (j < text.size() && is_space(text[j])) ++j;
      kind = "whitespace";
      trivia = true;
    } else if (c == ';') {
      j = text.find('\n', i);
      if (j == std::string_view::npos) j = text.size();
      kind = "comment";
      trivia = true;
    } else if (c == '(' || c == ')') {
      j = i + 1;
      kind = std::string(1, c);
    } else if (c == '"') {
      j = i + 1;
      while (j < text.size() && text[j] != '"') j += text[j] == '\\' ? 2 : 1;
      error = j >= text.size();
      j = std::min(j + 1, text.size());
      kind = "string";
    } else {
      while (j < text.size() && !is_space(text[j]) && text[j] != '(' && text[j] != ')' && text[j] != ';' &&
             text[j] != '"')
        ++j;
      kind = "atom";
    }
    tokens.push_back({kind, {i, j}, trivia, error, false, 0});
    i = j;
  }
  annotate_lines(text, tokens);
  return tokens;
}

class SexpParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  void program() {
    while (!at_end()) {
      if (at(")")) bump_as_error(); else item();
    }
  }

 private:
  void item() {
    if (at("(")) {
      auto m = open();
      bump();
      while (!at_end() && !at(")")) item();
      expect(")");
      close(m, "list");
    } else {
      bump();
    }
  }
};

}  // namespace

SyntaxTree parse_toy(std::string_view text, IdAllocator& ids) {
  ToyParser parser(text, lex_toy(text));
  parser.program();
  return parser.build("toy", ids, "program");
}

SyntaxTree parse_sexp(std::string_view text, IdAllocator& ids) {
  SexpParser parser(text, lex_sexp(text));
  parser.program();
  return parser.build("sexp", ids, "program");
}

}  // namespace trellis::detail
