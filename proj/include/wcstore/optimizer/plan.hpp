#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wcstore/dht/overlay.hpp"
#include "wcstore/tpq/pattern.hpp"

namespace wcstore::optimizer {

using net::PeerId;
using dht::DhtId;

enum class OpKind : std::uint8_t { index_lookup, range_lookup, intersect, struct_join, ship, at, recompose };

std::string_view to_string(OpKind kind);
std::optional<OpKind> op_kind_from(std::string_view name);

/// One operator. `site` is where the output lives: the executing peer, or
/// the destination for Ship. `nodes` lists the pattern nodes the output
/// covers (return nodes for Recompose).
struct PlanNode {
  OpKind kind = OpKind::index_lookup;
  PeerId site;
  DhtId dht;
  std::string key;  ///< IndexLookup
  std::string tag;  ///< RangeLookup
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<std::size_t> nodes;
  std::size_t parent_node = 0;  ///< StructJoin edge
  std::size_t child_node = 0;
  tpq::Axis axis = tpq::Axis::descendant;

  /// Upper bound on output postings per covered pattern node.
  std::map<std::size_t, std::uint64_t> est_rows;
  /// Bytes the output occupies when shipped.
  std::uint64_t est_bytes = 0;

  std::vector<std::unique_ptr<PlanNode>> children;

  std::unique_ptr<PlanNode> clone() const;
  bool is_leaf() const { return kind == OpKind::index_lookup || kind == OpKind::range_lookup; }
  /// Output is a single list shared by every covered node.
  bool single_list() const;
  /// Operator producing this output, looking through Ship and At.
  const PlanNode& producer() const;
};

struct Plan {
  tpq::TreePattern pattern;
  std::unique_ptr<PlanNode> root;

  Plan() = default;
  Plan(tpq::TreePattern p, std::unique_ptr<PlanNode> r) : pattern(std::move(p)), root(std::move(r)) {}
  Plan(const Plan& other);
  Plan& operator=(const Plan& other);
  Plan(Plan&&) noexcept = default;
  Plan& operator=(Plan&&) noexcept = default;

  std::size_t size() const;
};

/// Operators in preorder.
std::vector<const PlanNode*> preorder(const PlanNode& root);
std::vector<PlanNode*> preorder(PlanNode& root);

/// Sum over Ship operators of the estimated bytes they move between peers.
std::uint64_t cost(const Plan& plan);

/// Canonical plan document: one element per operator, inputs as children.
std::string to_document(const Plan& plan);
/// Throws MalformedPlan.
Plan from_document(std::string_view text);

/// Throws MalformedPlan unless leaves are lookups and every input lives at
/// its consumer's site (Ship inputs excepted).
void check_well_formed(const Plan& plan);

}  // namespace wcstore::optimizer
