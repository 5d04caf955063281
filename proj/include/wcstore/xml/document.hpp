#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wcstore::xml {

/// Interval label of a node: ancestry is strict interval containment within
/// one document. Text and attribute nodes have start == end.
struct StructuralId {
  std::uint64_t doc_id = 0;
  std::uint64_t start = 0;
  std::uint64_t end = 0;
  std::uint64_t depth = 0;

  auto operator<=>(const StructuralId&) const = default;
};

std::string to_string(const StructuralId& sid);

bool is_ancestor(const StructuralId& a, const StructuralId& d);
bool is_parent(const StructuralId& a, const StructuralId& d);

/// Index of a node inside its Document's node vector.
using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { element, text, attribute };

struct Node {
  NodeKind kind = NodeKind::element;
  /// Element tag, or "@name" for attributes; empty for text.
  std::string name;
  /// Text content or attribute value; empty for elements.
  std::string value;
  StructuralId label;
  std::optional<NodeId> parent;
  /// Attributes first, then element and text children, in document order.
  std::vector<NodeId> children;
};

class Document {
 public:
  Document() = default;
  Document(std::uint64_t doc_id, std::vector<Node> nodes);

  std::uint64_t doc_id() const { return doc_id_; }
  NodeId root() const { return 0; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }

  /// Node carrying exactly this label, if any.
  std::optional<NodeId> find(const StructuralId& label) const;

 private:
  std::uint64_t doc_id_ = 0;
  std::vector<Node> nodes_;  // sorted by label.start
};

/// Parses `xml_text` and labels it with one counter in a single pass.
/// Throws Errc::empty_input or Errc::malformed_xml.
Document parse_document(std::string_view xml_text, std::uint64_t doc_id);

/// Canonical XML for the subtree rooted at `root_label`. Throws
/// Errc::unknown_node when the label is not a node of `doc`.
std::string serialize_subtree(const Document& doc, const StructuralId& root_label);
std::string serialize_subtree(const Document& doc, NodeId root);

struct Resource {
  std::string resource_id;
  std::uint64_t doc_id = 0;
  StructuralId root_label;
  std::string payload;

  bool operator==(const Resource&) const = default;
};

/// "<doc_id>#<start>"
std::string resource_id_for(const StructuralId& sid);

/// The document root plus every element whose name is in `granularity`.
std::vector<Resource> extract_resources(const Document& doc,
                                        const std::set<std::string>& granularity);

// Text helpers shared by the index and the pattern evaluators.

/// Lowercased words of `text`; a word is a maximal run of ASCII alphanumerics
/// or non-ASCII bytes.
std::vector<std::string> words_of(std::string_view text);

/// Integer value of a text node whose whole (trimmed) content is a decimal
/// integer.
std::optional<std::int64_t> integer_content(std::string_view text);

}  // namespace wcstore::xml
