#include <array>
#include <cctype>
#include <optional>
#include <unordered_set>

#include "syntax/language.hpp"
#include "syntax/parser_base.hpp"

namespace trellis::detail {
namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "def", "return", "if", "elif", "else", "pass", "and", "or", "not", "in", "is", "True", "False", "None",
};

constexpr std::array<std::string_view, 40> kPunctuation = {
    "**=", "//=", ">>=", "<<=", "**", "//", "==", "!=", "<=", ">=", "->", "+=", "-=", "*=",
    "/=",  "%=",  "<<",  ">>",  ":=", "(",  ")",  "[",  "]",  "{",  "}",  ",",  ":",  ";",
    ".",   "+",   "-",   "*",   "/",  "%",  "@",  "<",  ">",  "=",  "&",  "|",
};
constexpr std::array<std::string_view, 2> kMorePunctuation = {"^", "~"};

bool is_string_prefix(std::string_view word) {
  if (word.size() > 2) return false;
  for (char c : word) {
    if (std::string_view("rRbBuUfF").find(c) == std::string_view::npos) return false;
  }
  return true;
}

// Returns end offset; `ok` false when unterminated.
std::size_t scan_string(std::string_view text, std::size_t i, bool& ok) {
  const char quote = text[i];
  const bool triple = text.substr(i, 3) == std::string(3, quote);
  i += triple ? 3 : 1;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\\') {
      i += 2;
      continue;
    }
    if (triple) {
      if (text.substr(i, 3) == std::string(3, quote)) {
        ok = true;
        return i + 3;
      }
    } else {
      if (c == quote) {
        ok = true;
        return i + 1;
      }
      if (c == '\n') break;
    }
    ++i;
  }
  ok = false;
  return std::min(i, text.size());
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto push = [&](std::string kind, std::size_t end, bool trivia = false, bool error = false) {
    tokens.push_back({std::move(kind), {i, end}, trivia, error, false, 0});
    i = end;
  };
  auto is_space = [&](std::size_t j) {
    char c = text[j];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return true;
    return c == '\\' && j + 1 < text.size() && text[j + 1] == '\n';
  };
  while (i < text.size()) {
    char c = text[i];
    if (is_space(i)) {
      std::size_t j = i;
      while (j < text.size() && is_space(j)) j += text[j] == '\\' ? 2 : 1;
      push("whitespace", j, true);
    } else if (c == '#') {
      std::size_t j = text.find('\n', i);
      push("comment", j == std::string_view::npos ? text.size() : j, true);
    } else if (is_ident_start(c) && c != '$') {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j]) && text[j] != '$') ++j;
      std::string_view word = text.substr(i, j - i);
      if (j < text.size() && (text[j] == '"' || text[j] == '\'') && is_string_prefix(word)) {
        bool ok = false;
        std::size_t end = scan_string(text, j, ok);
        push("string", end, false, !ok);
        continue;
      }
      push(kKeywords.count(word) ? std::string(word) : "identifier", j);
    } else if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '.' || text[j] == '_')) {
        if ((text[j] == 'e' || text[j] == 'E') && j + 1 < text.size() && (text[j + 1] == '+' || text[j + 1] == '-')) ++j;
        ++j;
      }
      push("integer", j);
      auto& t = tokens.back();
      if (text.substr(t.range.from, t.range.size()).find_first_of(".eE") != std::string_view::npos &&
          !text.substr(t.range.from, 2).starts_with("0x")) {
        t.kind = "float";
      }
    } else if (c == '"' || c == '\'') {
      bool ok = false;
      std::size_t j = scan_string(text, i, ok);
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
      for (auto p : kMorePunctuation) {
        if (!matched && text.substr(i, 1) == p) {
          push(std::string(p), i + 1);
          matched = true;
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
  const char* kind;
};

class PyParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  void module() {
    while (!at_end()) statement();
  }

 private:
  int nesting_ = 0;

  bool at_line_break() const { return at_end() || (nesting_ == 0 && peek().line_start); }

  bool can_start_expression() const {
    return at_any({"identifier", "integer", "float", "string", "True", "False", "None", "[", "(", "{",
                   "-", "+", "~", "not"});
  }

  void statement() {
    const std::size_t column = peek().column;
    if (at("def")) {
      auto m = open();
      bump();
      if (at("identifier")) bump(); else missing();
      parameters();
      expect(":");
      block(column);
      close(m, "function_definition");
      return;
    }
    if (at("if")) {
      auto m = open();
      bump();
      expression();
      expect(":");
      block(column);
      while (at("elif") && peek().column == column) {
        auto clause = open();
        bump();
        expression();
        expect(":");
        block(column);
        close(clause, "elif_clause");
      }
      if (at("else") && peek().column == column) {
        auto clause = open();
        bump();
        expect(":");
        block(column);
        close(clause, "else_clause");
      }
      close(m, "if_statement");
      return;
    }
    simple_statement();
    eat(";");
    while (!at_line_break()) bump_as_error();
  }

  void simple_statement() {
    if (at("return")) {
      auto m = open();
      bump();
      if (!at_line_break() && can_start_expression()) expression_list();
      close(m, "return_statement");
    } else if (at("pass")) {
      auto m = open();
      bump();
      close(m, "pass_statement");
    } else if (can_start_expression()) {
      auto m = open();
      auto lhs = expression_list();
      if (!at_line_break() && at("=")) {
        auto a = precede(lhs);
        bump();
        expression_list();
        close(a, "assignment");
      } else if (!at_line_break() && at_any({"+=", "-=", "*=", "/=", "//=", "%=", "**=", "<<=", ">>="})) {
        auto a = precede(lhs);
        bump();
        expression_list();
        close(a, "augmented_assignment");
      }
      close(m, "expression_statement");
    } else {
      bump_as_error();
    }
  }

  void block(std::size_t header_column) {
    auto m = open();
    if (!at_end() && !peek().line_start) {
      simple_statement();
      while (!at_line_break()) bump_as_error();
    } else if (at_end() || peek().column <= header_column) {
      missing();
    } else {
      while (!at_end() && peek().line_start && peek().column > header_column) statement();
    }
    close(m, "block");
  }

  void parameters() {
    auto m = open();
    expect("(");
    ++nesting_;
    while (at("identifier")) {
      bump();
      if (!eat(",")) break;
    }
    --nesting_;
    expect(")");
    close(m, "parameters");
  }

  Completed expression_list() {
    auto first = expression();
    if (!at(",") || at_line_break()) return first;
    auto m = precede(first);
    while (eat(",")) {
      if (at_line_break() || !can_start_expression()) break;
      expression();
    }
    return close(m, "expression_list");
  }

  Completed expression() { return expression_bp(0); }

  std::optional<BindingPower> infix_power() const {
    if (at_line_break()) return std::nullopt;
    std::string_view op = peek().kind;
    if (op == "if") return BindingPower{1, 2, "conditional_expression"};
    if (op == "or") return BindingPower{3, 4, "boolean_operator"};
    if (op == "and") return BindingPower{5, 6, "boolean_operator"};
    if (op == "<" || op == ">" || op == "==" || op == ">=" || op == "<=" || op == "!=" || op == "in" ||
        op == "is" || (op == "not" && peek(1).kind == "in"))
      return BindingPower{9, 10, "comparison_operator"};
    if (op == "|") return BindingPower{11, 12, "binary_operator"};
    if (op == "^") return BindingPower{13, 14, "binary_operator"};
    if (op == "&") return BindingPower{15, 16, "binary_operator"};
    if (op == "<<" || op == ">>") return BindingPower{17, 18, "binary_operator"};
    if (op == "+" || op == "-") return BindingPower{19, 20, "binary_operator"};
    if (op == "*" || op == "/" || op == "//" || op == "%" || op == "@") return BindingPower{21, 22, "binary_operator"};
    if (op == "**") return BindingPower{26, 25, "binary_operator"};
    return std::nullopt;
  }

  Completed expression_bp(int min_bp) {
    Completed lhs = prefix();
    for (;;) {
      auto power = infix_power();
      if (!power || power->left < min_bp) break;
      auto m = precede(lhs);
      if (at("if")) {
        bump();
        expression_bp(power->right);
        expect("else");
        expression_bp(power->right);
        lhs = close(m, power->kind);
        continue;
      }
      if (at("not") || at("is")) {
        bool is_is = at("is");
        bump();
        if (is_is) eat("not"); else expect("in");
      } else {
        bump();
      }
      expression_bp(power->right);
      lhs = close(m, power->kind);
    }
    return lhs;
  }

  Completed prefix() {
    if (at("not")) {
      auto m = open();
      bump();
      expression_bp(7);
      return close(m, "not_operator");
    }
    if (at_any({"-", "+", "~"})) {
      auto m = open();
      bump();
      expression_bp(23);
      return close(m, "unary_operator");
    }
    return postfix(primary());
  }

  template <typename F>
  void bracketed(std::string_view closer, F&& body) {
    bump();
    ++nesting_;
    body();
    --nesting_;
    expect(closer);
  }

  Completed primary() {
    if (at("True")) return bump_as("true");
    if (at("False")) return bump_as("false");
    if (at("None")) return bump_as("none");
    if (at_any({"identifier", "integer", "float", "string"})) return bump();
    if (at("[")) {
      auto m = open();
      bracketed("]", [&] {
        while (can_start_expression()) {
          expression();
          if (!eat(",")) break;
        }
      });
      return close(m, "list");
    }
    if (at("{")) {
      auto m = open();
      bracketed("}", [&] {
        while (can_start_expression()) {
          auto pair = open();
          expression();
          expect(":");
          expression();
          close(pair, "pair");
          if (!eat(",")) break;
        }
      });
      return close(m, "dictionary");
    }
    if (at("(")) {
      auto m = open();
      bool tuple = false;
      bracketed(")", [&] {
        if (at(")")) {
          tuple = true;
          return;
        }
        expression();
        while (eat(",")) {
          tuple = true;
          if (!can_start_expression()) break;
          expression();
        }
      });
      return close(m, tuple ? "tuple" : "parenthesized_expression");
    }
    return missing();
  }

  Completed postfix(Completed lhs) {
    for (;;) {
      if (at_line_break()) return lhs;
      if (at(".")) {
        auto m = precede(lhs);
        bump();
        if (at("identifier")) bump(); else missing();
        lhs = close(m, "attribute");
      } else if (at("(")) {
        auto m = precede(lhs);
        auto args = open();
        bracketed(")", [&] {
          while (can_start_expression()) {
            expression();
            if (!eat(",")) break;
          }
        });
        close(args, "argument_list");
        lhs = close(m, "call");
      } else if (at("[")) {
        auto m = precede(lhs);
        bracketed("]", [&] { expression(); });
        lhs = close(m, "subscript");
      } else {
        return lhs;
      }
    }
  }
};

}  // namespace

SyntaxTree parse_python(std::string_view text, IdAllocator& ids) {
  PyParser parser(text, lex(text));
  parser.module();
  return parser.build("python", ids, "module");
}

}  // namespace trellis::detail
