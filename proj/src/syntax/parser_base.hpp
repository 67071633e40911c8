#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "syntax/tree.hpp"

namespace trellis::detail {

struct Token {
  std::string kind;  // named kind ("identifier") or the literal text for punctuation
  TextRange range;
  bool trivia = false;
  bool error = false;
  bool line_start = false;  // first significant token on its line
  std::size_t column = 0;   // byte column of the token start
};

// Event-based tree builder shared by the hand-written recursive-descent
// parsers. Trivia preceding a token is attached to whichever node is open
// when the token is consumed, so every node starts and ends on a significant
// token.
class ParserBase {
 public:
  ParserBase(std::string_view text, std::vector<Token> tokens)
      : text_(text), tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!tokens_[i].trivia) significant_.push_back(i);
    }
  }

  SyntaxTree build(const std::string& language, IdAllocator& ids, const std::string& root_kind);

 protected:
  struct Marker {
    std::size_t event;
  };
  struct Completed {
    std::size_t event;
  };

  const Token& peek(std::size_t ahead = 0) const;
  bool at_end() const { return pos_ >= significant_.size(); }
  bool at(std::string_view kind) const { return !at_end() && peek().kind == kind; }
  bool at_any(std::initializer_list<std::string_view> kinds) const;
  std::string_view peek_text(std::size_t ahead = 0) const;

  Marker open();
  Completed close(Marker m, std::string kind);
  Marker precede(Completed c);
  Completed bump();
  Completed bump_as(std::string kind);
  void bump_as_error();
  bool eat(std::string_view kind);
  // Consumes `kind` or records a zero-width missing node.
  void expect(std::string_view kind);
  Completed missing();

  std::size_t position() const { return pos_; }

  std::string_view text_;

 private:
  enum class EventType { Open, Close, Token, Missing, Tombstone };
  struct Event {
    EventType type;
    std::string kind;
    std::size_t token = 0;
    bool error = false;
  };
  void flush_trivia();

  std::vector<Token> tokens_;
  std::vector<std::size_t> significant_;
  std::size_t pos_ = 0;        // index into significant_
  std::size_t raw_next_ = 0;   // next raw token index not yet emitted
  std::vector<Event> events_;
};

bool is_ident_start(char c);
bool is_ident_char(char c);
bool is_digit(char c);

// Fills `line_start` and `column` for significant tokens.
void annotate_lines(std::string_view text, std::vector<Token>& tokens);

}  // namespace trellis::detail
