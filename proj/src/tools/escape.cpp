#include "tools/escape.hpp"

#include <algorithm>

namespace trellis {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Parses `len` hex digits at `i`; -1 if malformed.
long read_hex(std::string_view s, std::size_t i, std::size_t len) {
  if (i + len > s.size()) return -1;
  long v = 0;
  for (std::size_t k = 0; k < len; ++k) {
    int h = hex_value(s[i + k]);
    if (h < 0) return -1;
    v = v * 16 + h;
  }
  return v;
}

}  // namespace

std::size_t Unescaped::from_raw(std::size_t raw) const {
  auto it = std::lower_bound(raw_offsets.begin(), raw_offsets.end(), raw);
  if (it == raw_offsets.end()) return text.size();
  return static_cast<std::size_t>(it - raw_offsets.begin());
}

Unescaped unescape_string(std::string_view body, char quote) {
  (void)quote;
  Unescaped out;
  std::size_t i = 0;
  auto emit = [&](std::string_view bytes, std::size_t raw) {
    for (char c : bytes) {
      out.text += c;
      out.raw_offsets.push_back(raw);
    }
  };
  while (i < body.size()) {
    if (body[i] != '\\' || i + 1 >= body.size()) {
      emit(body.substr(i, 1), i);
      ++i;
      continue;
    }
    const std::size_t start = i;
    const char e = body[i + 1];
    std::string decoded;
    std::size_t len = 2;
    switch (e) {
      case 'n': decoded = "\n"; break;
      case 't': decoded = "\t"; break;
      case 'r': decoded = "\r"; break;
      case 'b': decoded = "\b"; break;
      case 'f': decoded = "\f"; break;
      case 'v': decoded = "\v"; break;
      case '0': decoded = std::string(1, '\0'); break;
      case '\n': decoded = ""; break;  // line continuation
      case 'x': {
        long v = read_hex(body, i + 2, 2);
        if (v < 0) {
          decoded = "x";
        } else {
          append_utf8(decoded, static_cast<std::uint32_t>(v));
          len = 4;
        }
        break;
      }
      case 'u': {
        if (i + 2 < body.size() && body[i + 2] == '{') {
          std::size_t close = body.find('}', i + 3);
          long v = close == std::string_view::npos ? -1 : read_hex(body, i + 3, close - i - 3);
          if (v >= 0) {
            append_utf8(decoded, static_cast<std::uint32_t>(v));
            len = close + 1 - i;
            break;
          }
        } else if (long v = read_hex(body, i + 2, 4); v >= 0) {
          append_utf8(decoded, static_cast<std::uint32_t>(v));
          len = 6;
          break;
        }
        decoded = "u";
        break;
      }
      default:
        decoded = std::string(1, e);
    }
    emit(decoded, start);
    i += len;
  }
  out.raw_offsets.push_back(body.size());
  return out;
}

std::string escape_string(std::string_view text, char quote) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\\' || c == quote) {
      out += '\\';
      out += c;
    } else if (quote == '`') {
      if (c == '$' && i + 1 < text.size() && text[i + 1] == '{') out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else if (c == '\t') {
      out += "\\t";
    } else {
      out += c;
    }
  }
  return out;
}

TextChange escape_change(const Unescaped& decoded, const TextChange& change, char quote) {
  if (change.from > change.to || change.to > decoded.text.size()) {
    throw Error(ErrorCode::InvalidChange, "change outside the decoded string");
  }
  std::string insert = escape_string(change.insert, quote);
  // A `{` typed right after a literal `$` would open an interpolation.
  if (quote == '`' && !insert.empty() && insert.front() == '{' && change.from > 0 &&
      decoded.text[change.from - 1] == '$') {
    insert.insert(0, "\\");
  }
  return {decoded.to_raw(change.from), decoded.to_raw(change.to), std::move(insert)};
}

}  // namespace trellis
