#include "syntax/text.hpp"

namespace trellis {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownLanguage: return "UnknownLanguage";
    case ErrorCode::TemplateError: return "TemplateError";
    case ErrorCode::StaleScript: return "StaleScript";
    case ErrorCode::InvalidRollback: return "InvalidRollback";
    case ErrorCode::InvalidChange: return "InvalidChange";
    case ErrorCode::NothingToRevert: return "NothingToRevert";
    case ErrorCode::FragmentOrphaned: return "FragmentOrphaned";
    case ErrorCode::NotAList: return "NotAList";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::CannotDelete: return "CannotDelete";
    case ErrorCode::ReplaceFailed: return "ReplaceFailed";
    case ErrorCode::NoHeuristic: return "NoHeuristic";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::StaleInstance: return "StaleInstance";
    case ErrorCode::NotAnExpression: return "NotAnExpression";
    case ErrorCode::UnsupportedGrammar: return "UnsupportedGrammar";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::StaleVersion: return "StaleVersion";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string apply_changes(std::string_view text, std::span<const TextChange> changes) {
  std::string out(text);
  for (const auto& c : changes) {
    if (c.from > c.to || c.to > out.size()) {
      throw Error(ErrorCode::InvalidChange,
                  "change [" + std::to_string(c.from) + ", " + std::to_string(c.to) +
                      ") out of bounds for text of length " + std::to_string(out.size()));
    }
    out.replace(c.from, c.to - c.from, c.insert);
  }
  return out;
}

std::vector<TextChange> invert_changes(std::string_view original,
                                       std::span<const TextChange> changes) {
  std::vector<TextChange> inverse;
  inverse.reserve(changes.size());
  std::string current(original);
  for (const auto& c : changes) {
    if (c.from > c.to || c.to > current.size()) {
      throw Error(ErrorCode::InvalidChange, "cannot invert out-of-bounds change");
    }
    inverse.push_back({c.from, c.from + c.insert.size(), current.substr(c.from, c.to - c.from)});
    current.replace(c.from, c.to - c.from, c.insert);
  }
  return {inverse.rbegin(), inverse.rend()};
}

std::size_t map_position(std::size_t pos, const TextChange& change, bool is_end) {
  const std::size_t inserted = change.insert.size();
  if (pos < change.from) return pos;
  if (pos == change.from && change.from == change.to) return pos + inserted;
  if (pos >= change.to) return pos - (change.to - change.from) + inserted;
  // Strictly inside the replaced region.
  return is_end ? change.from + inserted : change.from;
}

}  // namespace trellis
