#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "syntax/tree.hpp"

namespace trellis {

class GrammarRules;
struct ExceptionTable;

struct Language {
  std::string id;
  std::function<SyntaxTree(std::string_view, IdAllocator&)> parse;
  std::string identifier_kind;
  std::string string_kind;  // empty when the language has no string literals
  // Kinds produced by the expression non-terminal; derived from the rules.
  std::set<std::string> expression_kinds;
  std::shared_ptr<const GrammarRules> rules;
  std::shared_ptr<const ExceptionTable> exceptions;
};

// Registered: "javascript" (alias "js"), "python", "toy", "sexp".
const Language& language(std::string_view id);
std::vector<std::string> language_ids();

SyntaxTree parse_document(std::string_view text, std::string_view language_id, IdAllocator& ids);

namespace detail {
SyntaxTree parse_javascript(std::string_view text, IdAllocator& ids);
SyntaxTree parse_python(std::string_view text, IdAllocator& ids);
SyntaxTree parse_toy(std::string_view text, IdAllocator& ids);
SyntaxTree parse_sexp(std::string_view text, IdAllocator& ids);
}  // namespace detail

}  // namespace trellis
