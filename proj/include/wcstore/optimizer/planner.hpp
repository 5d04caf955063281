#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wcstore/optimizer/plan.hpp"

namespace wcstore::optimizer {

struct Subquery {
  dht::OverlayKind overlay = dht::OverlayKind::hash;
  std::vector<std::size_t> nodes;  ///< pattern nodes, preorder
};

struct RecompositionEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  tpq::Axis axis = tpq::Axis::descendant;
};

struct Decomposition {
  std::vector<Subquery> subqueries;
  /// Pattern edges joining different subqueries.
  std::vector<RecompositionEdge> recomposition;
  std::vector<std::size_t> return_nodes;
};

/// Integer-range nodes become single-node range subqueries; each connected
/// remainder becomes one hash subquery.
Decomposition decompose(const tpq::TreePattern& pattern);

/// Where the overlays live and who owns which key.
struct PlanContext {
  DhtId hash_dht;
  std::optional<DhtId> range_dht;
  std::function<PeerId(DhtId, const std::string&)> owner;
};

/// Leaves evaluated at their owners and shipped to `query_peer`, where every
/// join and the final recomposition run. No estimates yet.
Plan build_naive_plan(const tpq::TreePattern& pattern, const Decomposition& decomposition,
                      const PlanContext& context, PeerId query_peer);

using PostingStats = std::map<std::string, std::uint64_t>;

/// Fills est_rows and est_bytes bottom-up. Estimates are upper bounds on
/// what execution produces; leaf estimates are exact for a catalog that
/// counts every put.
void annotate(Plan& plan, const PostingStats& stats);

/// A rewrite site: the plan produced by applying the rule at one operator.
struct Rule {
  std::string name;
  /// Returns the rewritten plan, or nothing if the rule does not match at
  /// the operator with preorder index `at`.
  std::function<std::optional<Plan>(const Plan&, std::size_t at)> apply;
};

/// Moves a join to the site of its largest input.
Rule join_site_push();
/// Merges a join's two inputs when they are the same lookup at the same site.
Rule lookup_fusion();
/// Ship(Ship(x)) -> Ship(x).
Rule ship_collapse();
/// Drops Ship operators that do not leave their site and nested At wrappers.
Rule dead_op();
std::vector<Rule> default_rules();

/// Each pass applies the rewrite with the best (lowest) resulting cost; ties
/// go to rule order, then to the leftmost operator. A rewrite must lower the
/// cost, or keep it and shrink the plan. Stops at a fixpoint or after
/// `max_passes` passes.
Plan rewrite(const Plan& plan, const std::vector<Rule>& rules, std::size_t max_passes);

/// Greedy placement: every join runs at the site of its largest estimated
/// input (ties: the query peer, then the leftmost input), Recompose at the
/// query peer. Falls back to evaluating everything at the query peer when
/// that is estimated cheaper.
Plan place(const Plan& plan, const PostingStats& stats, PeerId query_peer);

/// Removes every Ship and inserts one wherever an input lives on a peer
/// other than its consumer.
void reconcile_ships(PlanNode& root);

}  // namespace wcstore::optimizer
