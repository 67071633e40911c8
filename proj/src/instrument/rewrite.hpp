#pragma once

#include <map>
#include <string>
#include <string_view>

#include "syntax/language.hpp"
#include "syntax/tree.hpp"

namespace trellis {

inline constexpr std::string_view kDefaultEndpoint = "http://localhost:3000/watch";

// Immediately-evaluated wrapper around `expression_source` that posts
// {id, e} to `endpoint` and evaluates to the value.
std::string watch_wrapper(std::string_view expression_source, std::uint64_t id, std::string_view endpoint);
// True when `source` already is such a wrapper.
bool is_watch_wrapper(std::string_view source);

// Rewritten source of one expression node. Throws UnsupportedGrammar when
// the language has no wrapper template and NotAnExpression otherwise.
std::string rewrite_for_watch(const SyntaxTree& tree, const Language& lang, NodeId node, std::uint64_t id,
                              std::string_view endpoint = kDefaultEndpoint);

// Shadow copy of the document with every node in `watched` (node -> report id)
// rewritten. Nested watched nodes are rewritten inside out. The tree itself
// and the user's text are untouched.
std::string instrument_document(const SyntaxTree& tree, const Language& lang,
                                const std::map<NodeId, std::uint64_t>& watched,
                                std::string_view endpoint = kDefaultEndpoint);

}  // namespace trellis
