#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wcstore/xml/document.hpp"

namespace wcstore::tpq {

enum class Axis : std::uint8_t { child, descendant };

std::string_view to_string(Axis axis);

struct WordEquals {
  std::string word;  ///< lowercased, a single word

  bool operator==(const WordEquals&) const = default;
};

struct IntRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;  ///< inclusive

  bool operator==(const IntRange&) const = default;
};

using ValuePredicate = std::variant<WordEquals, IntRange>;

struct PatternNode {
  /// Element tag, "@name" for an attribute, or "*" for any element.
  std::string label;
  std::optional<ValuePredicate> predicate;
  bool returned = false;
  std::optional<std::size_t> parent;
  /// Edge from the parent; for the root, the relation to the document node
  /// (child: the root element itself, descendant: any element).
  Axis axis = Axis::descendant;
  std::vector<std::size_t> children;

  bool is_wildcard() const { return label == "*"; }
  bool is_attribute() const { return !label.empty() && label[0] == '@'; }
  bool operator==(const PatternNode&) const = default;
};

/// Rooted twig query. Node indices are in preorder, so every parent index
/// is smaller than its children's.
class TreePattern {
 public:
  std::size_t add_node(std::string label, std::optional<std::size_t> parent, Axis axis);

  std::size_t size() const { return nodes_.size(); }
  const PatternNode& node(std::size_t i) const { return nodes_.at(i); }
  PatternNode& node(std::size_t i) { return nodes_.at(i); }
  const std::vector<PatternNode>& nodes() const { return nodes_; }
  std::size_t root() const { return 0; }
  std::vector<std::size_t> return_nodes() const;

  /// Throws invalid_argument if the structural invariants are broken.
  void validate() const;

  bool operator==(const TreePattern&) const = default;

 private:
  std::vector<PatternNode> nodes_;
};

/// pattern := step+ ; step := ("/" | "//") name pred* "!"? ;
/// pred := "[" pattern "]" | "=" "\"word\"" | "in" int ".." int
/// The root is returned when no step is marked with "!".
TreePattern parse_pattern(std::string_view text);

/// Canonical text: same grammar, minimal whitespace, value predicate before
/// child predicates, every child written as a bracketed predicate.
std::string to_string(const TreePattern& pattern);

/// Whether document node `id` satisfies the label and value predicate of
/// pattern node `pn` (axes not considered).
bool node_test(const PatternNode& pn, const xml::Document& doc, xml::NodeId id);

/// One match: element i is the label bound to pattern node i.
using Binding = std::vector<xml::StructuralId>;

/// Canonical order: by return-node labels in node order, then by all labels.
void sort_canonical(const TreePattern& pattern, std::vector<Binding>& bindings);

/// Distinct tuples of return-node labels, in canonical order.
std::vector<std::vector<xml::StructuralId>> return_tuples(const TreePattern& pattern,
                                                         const std::vector<Binding>& bindings);

}  // namespace wcstore::tpq
