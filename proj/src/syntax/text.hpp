#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trellis {

enum class ErrorCode {
  UnknownLanguage = 1,
  TemplateError,
  StaleScript,
  InvalidRollback,
  InvalidChange,
  NothingToRevert,
  FragmentOrphaned,
  NotAList,
  IndexOutOfRange,
  CannotDelete,
  ReplaceFailed,
  NoHeuristic,
  UnknownAction,
  StaleInstance,
  NotAnExpression,
  UnsupportedGrammar,
  BadRequest,
  UnknownSession,
  StaleVersion,
  MalformedMessage,
  UnknownNode,
  Io,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Half-open byte interval [from, to) in UTF-8 text.
struct TextRange {
  std::size_t from = 0;
  std::size_t to = 0;

  std::size_t size() const { return to - from; }
  bool empty() const { return from == to; }
  bool contains(const TextRange& other) const {
    return from <= other.from && other.to <= to;
  }
  friend bool operator==(const TextRange&, const TextRange&) = default;
};

/// Replace bytes [from, to) with `insert`.
struct TextChange {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string insert;

  friend bool operator==(const TextChange&, const TextChange&) = default;
};

// Applies changes in order; each change's offsets refer to the text produced
// by the changes before it. Throws InvalidChange when a change is out of
// bounds, leaving `text` unchanged.
std::string apply_changes(std::string_view text, std::span<const TextChange> changes);

// Inverse changes that undo `changes` (already in application order for the
// undo, i.e. reversed).
std::vector<TextChange> invert_changes(std::string_view original,
                                       std::span<const TextChange> changes);

// Position mapping through one change. Insertions exactly at `pos` push it
// right.
std::size_t map_position(std::size_t pos, const TextChange& change, bool is_end);

}  // namespace trellis
