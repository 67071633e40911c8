#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "syntax/text.hpp"

namespace trellis {

/// Decoded literal body plus, for every decoded byte offset (and the end),
/// the offset in the raw body it came from.
struct Unescaped {
  std::string text;
  std::vector<std::size_t> raw_offsets;  // size text.size() + 1

  std::size_t to_raw(std::size_t offset) const { return raw_offsets.at(offset); }
  // Decoded offset at or after `raw`.
  std::size_t from_raw(std::size_t raw) const;
};

// `quote` is '`', '"' or '\''. The body excludes the delimiters.
Unescaped unescape_string(std::string_view body, char quote);
std::string escape_string(std::string_view text, char quote);

// Rewrites a change in decoded coordinates into one on the raw body.
TextChange escape_change(const Unescaped& decoded, const TextChange& change, char quote);

}  // namespace trellis
