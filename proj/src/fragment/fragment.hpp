#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transaction/session_state.hpp"

namespace trellis {

using FragmentId = std::uint64_t;
inline constexpr FragmentId kRootFragment = 0;

// Per-tool override of the whitespace heuristic.
struct WhitespaceOptions {
  bool include_left = true;
  bool include_right = true;
};

struct Fragment {
  FragmentId id = kRootFragment;
  std::vector<NodeId> nodes;  // consecutive siblings
  std::optional<std::uint64_t> owner;  // tool instance
  int depth = 0;
  WhitespaceOptions whitespace;
};

struct FragmentView {
  FragmentId id = kRootFragment;
  TextRange node_range;  // covering range of the nodes, shifted by pending changes
  TextRange range;       // node_range plus the pulled-in whitespace
  std::string display_text;
  std::string indent_prefix;       // common indentation replaced by one tab
  std::vector<bool> line_indented;  // per display line: prefix replaced
  std::size_t leading_take = 0;    // whitespace bytes pulled in on the left
  std::size_t trailing_take = 0;   // whitespace bytes pulled in on the right

  std::size_t indent_prefix_width() const { return indent_prefix.size(); }
};

inline constexpr char kIndentSymbol = '\t';

// Throws FragmentOrphaned when a node is gone or the nodes are not consecutive siblings.
TextRange fragment_range(const Fragment& fragment, const SessionState& session);
FragmentView display_text(const Fragment& fragment, const SessionState& session);

// Inverse of the indentation normalisation: the text of `view.range`.
std::string restore_indentation(const FragmentView& view);
// Text of `view.node_range`.
std::string unnormalize(const FragmentView& view);

// Document offset of a byte offset in display_text, and back.
std::size_t display_to_document(const FragmentView& view, std::size_t display_offset);
std::size_t document_to_display(const FragmentView& view, std::size_t document_offset);

struct Selection {
  FragmentId fragment = kRootFragment;
  TextRange range;  // document offsets
};

struct SelectionResult {
  Selection selection;
  // Every fragment covering the range, smallest first; frontends may pick by geometry.
  std::vector<FragmentId> candidates;
};

// Maps `previous` through `changes`, then picks its fragment if it still
// covers the range, else the smallest covering fragment, else the root.
SelectionResult restore_selection(const std::vector<FragmentView>& views, const Selection& previous,
                                  std::span<const TextChange> changes);

/// Live fragments of one session.
class FragmentRegistry {
 public:
  FragmentId create(std::vector<NodeId> nodes, std::optional<std::uint64_t> owner, int depth,
                    WhitespaceOptions whitespace = {});
  void dispose(FragmentId id);
  void dispose_owned_by(std::uint64_t owner);
  const Fragment* find(FragmentId id) const;
  const std::map<FragmentId, Fragment>& all() const { return fragments_; }

  // Views of the root and every live fragment; orphaned fragments are disposed
  // and reported.
  std::vector<FragmentView> update(const SessionState& session, std::vector<FragmentId>* orphaned = nullptr);

 private:
  std::map<FragmentId, Fragment> fragments_;
  FragmentId next_ = 1;
};

nlohmann::json to_json(const FragmentView& view);

}  // namespace trellis
