#include "syntax/parser_base.hpp"

namespace trellis::detail {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

void annotate_lines(std::string_view text, std::vector<Token>& tokens) {
  bool seen_on_line = false;
  std::size_t line_begin = 0;
  std::size_t scanned = 0;
  for (auto& t : tokens) {
    for (; scanned < t.range.from; ++scanned) {
      if (text[scanned] == '\n') {
        seen_on_line = false;
        line_begin = scanned + 1;
      }
    }
    if (!t.trivia) {
      t.line_start = !seen_on_line;
      t.column = t.range.from - line_begin;
      seen_on_line = true;
    }
    // Multi-line tokens (template strings, block comments) move the line.
    for (; scanned < t.range.to; ++scanned) {
      if (text[scanned] == '\n') {
        line_begin = scanned + 1;
        if (t.trivia) seen_on_line = false;
      }
    }
  }
}

const Token& ParserBase::peek(std::size_t ahead) const {
  static const Token eof{"<eof>", {}, false, false, true, 0};
  std::size_t i = pos_ + ahead;
  if (i >= significant_.size()) return eof;
  return tokens_[significant_[i]];
}

bool ParserBase::at_any(std::initializer_list<std::string_view> kinds) const {
  if (at_end()) return false;
  for (auto k : kinds) {
    if (peek().kind == k) return true;
  }
  return false;
}

std::string_view ParserBase::peek_text(std::size_t ahead) const {
  const auto& t = peek(ahead);
  if (t.kind == "<eof>") return {};
  return text_.substr(t.range.from, t.range.size());
}

void ParserBase::flush_trivia() {
  std::size_t limit = pos_ < significant_.size() ? significant_[pos_] : tokens_.size();
  for (; raw_next_ < limit; ++raw_next_) {
    events_.push_back({EventType::Token, {}, raw_next_, false});
  }
}

ParserBase::Marker ParserBase::open() {
  flush_trivia();
  events_.push_back({EventType::Open, {}, 0, false});
  return {events_.size() - 1};
}

ParserBase::Completed ParserBase::close(Marker m, std::string kind) {
  events_[m.event].kind = std::move(kind);
  events_.push_back({EventType::Close, {}, 0, false});
  return {m.event};
}

ParserBase::Marker ParserBase::precede(Completed c) {
  events_.insert(events_.begin() + static_cast<std::ptrdiff_t>(c.event), Event{EventType::Open, {}, 0, false});
  return {c.event};
}

ParserBase::Completed ParserBase::bump() { return bump_as({}); }

ParserBase::Completed ParserBase::bump_as(std::string kind) {
  if (at_end()) return missing();
  flush_trivia();
  events_.push_back({EventType::Token, std::move(kind), significant_[pos_], false});
  raw_next_ = significant_[pos_] + 1;
  ++pos_;
  return {events_.size() - 1};
}

void ParserBase::bump_as_error() {
  if (at_end()) return;
  flush_trivia();
  events_.push_back({EventType::Token, {}, significant_[pos_], true});
  raw_next_ = significant_[pos_] + 1;
  ++pos_;
}

bool ParserBase::eat(std::string_view kind) {
  if (!at(kind)) return false;
  bump();
  return true;
}

void ParserBase::expect(std::string_view kind) {
  if (!eat(kind)) missing();
}

ParserBase::Completed ParserBase::missing() {
  events_.push_back({EventType::Missing, {}, 0, true});
  return {events_.size() - 1};
}

SyntaxTree ParserBase::build(const std::string& language, IdAllocator& ids, const std::string& root_kind) {
  // Trailing trivia belongs to the root.
  pos_ = significant_.size();
  flush_trivia();

  SyntaxTree tree(language, ids.next());
  SyntaxNode root;
  root.id = tree.root();
  root.kind = root_kind;
  tree.add_node(std::move(root));

  std::vector<NodeId> stack{tree.root()};
  auto attach = [&](SyntaxNode n) {
    n.parent = stack.back();
    NodeId id = n.id;
    tree.add_node(std::move(n));
    tree.mutable_node(stack.back()).children.push_back(id);
    return id;
  };

  for (const auto& e : events_) {
    switch (e.type) {
      case EventType::Open: {
        SyntaxNode n;
        n.id = ids.next();
        n.kind = e.kind;
        stack.push_back(attach(std::move(n)));
        break;
      }
      case EventType::Close:
        stack.pop_back();
        break;
      case EventType::Token: {
        const auto& t = tokens_[e.token];
        SyntaxNode n;
        n.id = ids.next();
        n.is_leaf = true;
        n.is_trivia = t.trivia;
        n.is_error = t.error || e.error;
        n.kind = n.is_error ? "ERROR" : (e.kind.empty() ? t.kind : e.kind);
        n.text = std::string(text_.substr(t.range.from, t.range.size()));
        attach(std::move(n));
        break;
      }
      case EventType::Missing: {
        SyntaxNode n;
        n.id = ids.next();
        n.is_leaf = true;
        n.is_error = true;
        n.kind = "ERROR";
        attach(std::move(n));
        break;
      }
      case EventType::Tombstone:
        break;
    }
  }
  tree.finalize();
  return tree;
}

}  // namespace trellis::detail
