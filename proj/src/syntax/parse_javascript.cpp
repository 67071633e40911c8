#include <array>
#include <cctype>
#include <optional>
#include <unordered_set>

#include "syntax/language.hpp"
#include "syntax/parser_base.hpp"

namespace trellis::detail {
namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "var", "let", "const", "function", "return", "if", "else", "true", "false", "null", "typeof",
};

// Longest first.
constexpr std::array<std::string_view, 40> kPunctuation = {
    "===", "!==", "**=", "...", "=>", "==", "!=", "<=", ">=", "&&", "||", "**", "+=", "-=",
    "*=",  "/=",  "%=",  "++",  "--", "<<", ">>", "{",  "}",  "(",  ")",  "[",  "]",  ";",
    ",",   ".",   "<",   ">",   "+",  "-",  "*",  "/",  "%",  "!",  "~",  "?",
};
constexpr std::array<std::string_view, 5> kSinglePunctuation = {":", "=", "&", "|", "^"};

std::size_t scan_quoted(std::string_view text, std::size_t i, bool& ok) {
  const char quote = text[i++];
  while (i < text.size()) {
    char c = text[i];
    if (c == '\\') {
      i += 2;
      continue;
    }
    if (c == quote) {
      ok = true;
      return i + 1;
    }
    if (c == '\n') break;
    ++i;
  }
  ok = false;
  return std::min(i, text.size());
}

std::size_t scan_template(std::string_view text, std::size_t i, bool& ok) {
  ++i;
  int interpolation_depth = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\\') {
      i += 2;
      continue;
    }
    if (interpolation_depth == 0 && c == '`') {
      ok = true;
      return i + 1;
    }
    if (c == '$' && i + 1 < text.size() && text[i + 1] == '{') {
      ++interpolation_depth;
      i += 2;
      continue;
    }
    if (interpolation_depth > 0 && c == '}') --interpolation_depth;
    ++i;
  }
  ok = false;
  return text.size();
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto push = [&](std::string kind, std::size_t end, bool trivia = false, bool error = false) {
    tokens.push_back({std::move(kind), {i, end}, trivia, error, false, 0});
    i = end;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      std::size_t j = i;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' || text[j] == '\n' || text[j] == '\r')) ++j;
      push("whitespace", j, true);
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      std::size_t j = text.find('\n', i);
      push("comment", j == std::string_view::npos ? text.size() : j, true);
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      std::size_t j = text.find("*/", i + 2);
      push("comment", j == std::string_view::npos ? text.size() : j + 2, true);
    } else if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      std::string_view word = text.substr(i, j - i);
      push(kKeywords.count(word) ? std::string(word) : "identifier", j);
    } else if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      std::size_t j = i;
      if (c == '0' && j + 1 < text.size() && (text[j + 1] == 'x' || text[j + 1] == 'X')) {
        j += 2;
        while (j < text.size() && std::isxdigit(static_cast<unsigned char>(text[j]))) ++j;
      } else {
        while (j < text.size() && is_digit(text[j])) ++j;
        if (j < text.size() && text[j] == '.') {
          ++j;
          while (j < text.size() && is_digit(text[j])) ++j;
        }
        if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
          if (k < text.size() && is_digit(text[k])) {
            j = k;
            while (j < text.size() && is_digit(text[j])) ++j;
          }
        }
      }
      push("number", j);
    } else if (c == '"' || c == '\'') {
      bool ok = false;
      std::size_t j = scan_quoted(text, i, ok);
      push("string", j, false, !ok);
    } else if (c == '`') {
      bool ok = false;
      std::size_t j = scan_template(text, i, ok);
      push("string", j, false, !ok);
    } else {
      bool matched = false;
      for (auto p : kPunctuation) {
        if (text.substr(i, p.size()) == p) {
          push(std::string(p), i + p.size());
          matched = true;
          break;
        }
      }
      if (!matched) {
        for (auto p : kSinglePunctuation) {
          if (text.substr(i, 1) == p) {
            // Compound assignment forms were handled above.
            push(std::string(p), i + 1);
            matched = true;
            break;
          }
        }
      }
      if (!matched) push("ERROR", i + 1, false, true);
    }
  }
  annotate_lines(text, tokens);
  return tokens;
}

struct BindingPower {
  int left;
  int right;
};

class JsParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  void program() {
    while (!at_end()) statement();
  }

 private:
  static constexpr int kAssignment = 1;
  static constexpr int kUnary = 28;

  bool can_start_expression() const {
    return at_any({"identifier", "number", "string", "true", "false", "null", "[", "{", "(", "!", "-",
                   "+", "~", "typeof", "++", "--"});
  }

  void statement() {
    if (at_any({"var", "let", "const"})) {
      auto m = open();
      bump();
      declarator();
      while (eat(",")) declarator();
      eat(";");
      close(m, "variable_declaration");
    } else if (at("function")) {
      auto m = open();
      bump();
      if (at("identifier")) bump(); else missing();
      formal_parameters();
      block();
      close(m, "function_declaration");
    } else if (at("return")) {
      auto m = open();
      bump();
      if (!at_end() && !at(";") && !at("}") && !peek().line_start && can_start_expression()) expression();
      eat(";");
      close(m, "return_statement");
    } else if (at("if")) {
      auto m = open();
      bump();
      parenthesized();
      statement_or_missing();
      if (at("else")) {
        bump();
        statement_or_missing();
      }
      close(m, "if_statement");
    } else if (at("{")) {
      block();
    } else if (at(";")) {
      auto m = open();
      bump();
      close(m, "empty_statement");
    } else if (can_start_expression()) {
      auto m = open();
      expression();
      eat(";");
      close(m, "expression_statement");
    } else {
      bump_as_error();
    }
  }

  void statement_or_missing() {
    if (at_end() || at("}")) missing(); else statement();
  }

  void declarator() {
    auto m = open();
    if (at("identifier")) bump(); else missing();
    if (eat("=")) expression();
    close(m, "variable_declarator");
  }

  void block() {
    auto m = open();
    expect("{");
    while (!at_end() && !at("}")) statement();
    expect("}");
    close(m, "statement_block");
  }

  void parenthesized() {
    auto m = open();
    expect("(");
    expression();
    expect(")");
    close(m, "parenthesized_expression");
  }

  void formal_parameters() {
    auto m = open();
    expect("(");
    while (at("identifier")) {
      bump();
      if (!eat(",")) break;
    }
    expect(")");
    close(m, "formal_parameters");
  }

  void arguments() {
    auto m = open();
    bump();  // (
    while (!at_end() && !at(")") && can_start_expression()) {
      expression();
      if (!eat(",")) break;
    }
    expect(")");
    close(m, "arguments");
  }

  Completed expression() { return expression_bp(kAssignment); }

  static std::optional<BindingPower> infix_power(std::string_view op) {
    if (op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" || op == "**=")
      return BindingPower{2, 1};
    if (op == "?") return BindingPower{4, 3};
    if (op == "||") return BindingPower{5, 6};
    if (op == "&&") return BindingPower{7, 8};
    if (op == "|") return BindingPower{9, 10};
    if (op == "^") return BindingPower{11, 12};
    if (op == "&") return BindingPower{13, 14};
    if (op == "==" || op == "!=" || op == "===" || op == "!==") return BindingPower{15, 16};
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return BindingPower{17, 18};
    if (op == "<<" || op == ">>") return BindingPower{19, 20};
    if (op == "+" || op == "-") return BindingPower{21, 22};
    if (op == "*" || op == "/" || op == "%") return BindingPower{23, 24};
    if (op == "**") return BindingPower{27, 26};
    return std::nullopt;
  }

  Completed expression_bp(int min_bp) {
    Completed lhs = prefix();
    for (;;) {
      if (at_end()) break;
      std::string_view op = peek().kind;
      auto power = infix_power(op);
      if (!power || power->left < min_bp) break;
      auto m = precede(lhs);
      if (op == "?") {
        bump();
        expression_bp(kAssignment);
        expect(":");
        expression_bp(power->right);
        lhs = close(m, "ternary_expression");
        continue;
      }
      bump();
      expression_bp(power->right);
      lhs = close(m, power->right < power->left && op != "**" ? "assignment_expression" : "binary_expression");
    }
    return lhs;
  }

  Completed prefix() {
    if (at_any({"!", "-", "+", "~", "typeof"})) {
      auto m = open();
      bump();
      expression_bp(kUnary);
      return close(m, "unary_expression");
    }
    if (at_any({"++", "--"})) {
      auto m = open();
      bump();
      expression_bp(kUnary);
      return close(m, "update_expression");
    }
    return postfix(primary());
  }

  bool arrow_ahead() const {
    if (at("identifier")) return peek(1).kind == "=>";
    if (!at("(")) return false;
    int depth = 0;
    for (std::size_t k = 0;; ++k) {
      const auto& t = peek(k);
      if (t.kind == "<eof>") return false;
      if (t.kind == "(") ++depth;
      if (t.kind == ")" && --depth == 0) return peek(k + 1).kind == "=>";
    }
  }

  Completed arrow_function() {
    auto m = open();
    if (at("identifier")) bump(); else formal_parameters();
    expect("=>");
    if (at("{")) block(); else expression_bp(kAssignment);
    return close(m, "arrow_function");
  }

  Completed primary() {
    if (arrow_ahead()) return arrow_function();
    if (at_any({"identifier", "number", "string", "true", "false", "null"})) return bump();
    if (at("[")) {
      auto m = open();
      bump();
      while (!at_end() && !at("]") && can_start_expression()) {
        expression();
        if (!eat(",")) break;
      }
      expect("]");
      return close(m, "array");
    }
    if (at("{")) {
      auto m = open();
      bump();
      while (at_any({"identifier", "string", "number"})) {
        if (at("identifier") && peek(1).kind != ":") {
          bump_as("shorthand_property_identifier");
        } else {
          auto pair = open();
          if (at("identifier")) bump_as("property_identifier"); else bump();
          expect(":");
          expression();
          close(pair, "pair");
        }
        if (!eat(",")) break;
      }
      expect("}");
      return close(m, "object");
    }
    if (at("(")) {
      auto m = open();
      bump();
      Completed first = expression();
      if (at(",")) {
        auto seq = precede(first);
        while (eat(",")) expression();
        close(seq, "sequence_expression");
      }
      expect(")");
      return close(m, "parenthesized_expression");
    }
    return missing();
  }

  Completed postfix(Completed lhs) {
    for (;;) {
      if (at(".")) {
        auto m = precede(lhs);
        bump();
        if (at("identifier")) bump_as("property_identifier"); else missing();
        lhs = close(m, "member_expression");
      } else if (at("[")) {
        auto m = precede(lhs);
        bump();
        expression();
        expect("]");
        lhs = close(m, "subscript_expression");
      } else if (at("(")) {
        auto m = precede(lhs);
        arguments();
        lhs = close(m, "call_expression");
      } else if (at("string") && peek_text().starts_with("`")) {
        auto m = precede(lhs);
        bump();
        lhs = close(m, "call_expression");
      } else {
        return lhs;
      }
    }
  }
};

}  // namespace

SyntaxTree parse_javascript(std::string_view text, IdAllocator& ids) {
  JsParser parser(text, lex(text));
  parser.program();
  return parser.build("javascript", ids, "program");
}

}  // namespace trellis::detail
